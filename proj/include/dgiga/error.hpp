#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dgiga {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Degenerate or inconsistent geometry (singular Jacobian, zero-length face).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Newton point inversion did not reach the requested tolerance.
class InversionError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent assembly input, e.g. a face claimed twice.
class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// Iterative solve did not converge.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<double> history)
      : Error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

/// Non-positive curvature met in CG or a non-positive pivot in Cholesky.
/// For the dG system this means the interior penalty is too small.
class IndefiniteError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or configuration.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace dgiga
