#pragma once

// Compressed row storage and the vector kernels used by assembly and CG.
// Every kernel has a serial reference version and an OpenMP version; the
// OpenMP reductions sum fixed-size blocks in a fixed order, so results do not
// depend on the thread count.

#include <cstddef>
#include <span>
#include <vector>

namespace dgiga {

enum class Exec { Serial, Parallel };

struct CsrMatrix {
  int rows = 0;
  std::vector<std::size_t> row_ptr;  ///< size rows+1
  std::vector<int> cols;             ///< sorted within each row
  std::vector<double> vals;

  std::size_t nnz() const { return cols.size(); }
  /// Position of (r, c) in vals, or npos.
  std::size_t find(int r, int c) const;
  double at(int r, int c) const;
  std::vector<double> diagonal() const;
  /// Dense copy (tests and small direct solves only).
  std::vector<double> to_dense() const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Builds an all-zero matrix from per-row sorted unique column lists.
CsrMatrix make_csr(const std::vector<std::vector<int>>& pattern);

void spmv(const CsrMatrix& A, std::span<const double> x, std::span<double> y, Exec exec);
double dot(std::span<const double> a, std::span<const double> b, Exec exec);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y, Exec exec);

/// max |A - A^T| / max |A|
double symmetry_defect(const CsrMatrix& A);

}  // namespace dgiga
