#pragma once

// Linear solvers for the symmetric positive definite dG system.

#include <string>
#include <vector>

#include "dgiga/error.hpp"
#include "dgiga/sparse.hpp"

namespace dgiga {

enum class SolveMethod {
  Auto,           ///< sparse LDL^T up to kDirectLimit unknowns, else CG with LDL^T fallback
  CG,             ///< Jacobi-preconditioned conjugate gradients
  DenseCholesky,
  SparseCholesky, ///< sparse LDL^T with fill-reducing ordering
};

inline constexpr int kDirectLimit = 20000;

std::string to_string(SolveMethod m);
SolveMethod parse_solve_method(const std::string& s);

struct SolveOptions {
  double tol = 1e-10;  ///< relative residual for CG
  int max_iter = 0;    ///< 0: 10 * rows
  SolveMethod method = SolveMethod::Auto;
  Exec exec = Exec::Parallel;
};

struct SolveReport {
  int iterations = 0;
  double rel_residual = 0.0;
  double wall_seconds = 0.0;
  SolveMethod method = SolveMethod::CG;
  std::vector<double> residual_history;
};

/// Solves A x = b. x holds the initial guess for CG and the result on return.
/// Throws IndefiniteError when CG meets p^T A p <= 0 and SolverError when it
/// does not reach the tolerance.
SolveReport solve(const CsrMatrix& A, const std::vector<double>& b, std::vector<double>& x,
                  const SolveOptions& opts = {});

SolveReport solve_cg(const CsrMatrix& A, const std::vector<double>& b, std::vector<double>& x,
                     const SolveOptions& opts);

/// In-place Cholesky of a dense row-major n x n matrix (lower factor).
/// Throws IndefiniteError on a non-positive pivot.
void cholesky_factor(std::vector<double>& M, int n);
void cholesky_solve(const std::vector<double>& L, int n, std::vector<double>& x);

SolveReport solve_dense(const CsrMatrix& A, const std::vector<double>& b, std::vector<double>& x);
SolveReport solve_sparse_direct(const CsrMatrix& A, const std::vector<double>& b, std::vector<double>& x);

/// ||b - A x|| / ||b||
double relative_residual(const CsrMatrix& A, const std::vector<double>& b, const std::vector<double>& x);

}  // namespace dgiga
