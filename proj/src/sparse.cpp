#include "dgiga/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dgiga {

namespace {
constexpr std::size_t kBlock = 4096;
}

std::size_t CsrMatrix::find(int r, int c) const {
  const auto begin = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]);
  const auto end = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]);
  const auto it = std::lower_bound(begin, end, c);
  if (it == end || *it != c) return npos;
  return static_cast<std::size_t>(it - cols.begin());
}

double CsrMatrix::at(int r, int c) const {
  const std::size_t p = find(r, c);
  return p == npos ? 0.0 : vals[p];
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(rows, 0.0);
  for (int r = 0; r < rows; ++r) d[r] = at(r, r);
  return d;
}

std::vector<double> CsrMatrix::to_dense() const {
  std::vector<double> D(static_cast<std::size_t>(rows) * rows, 0.0);
  for (int r = 0; r < rows; ++r) {
    for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) {
      D[static_cast<std::size_t>(r) * rows + cols[p]] = vals[p];
    }
  }
  return D;
}

CsrMatrix make_csr(const std::vector<std::vector<int>>& pattern) {
  CsrMatrix A;
  A.rows = static_cast<int>(pattern.size());
  A.row_ptr.assign(pattern.size() + 1, 0);
  for (std::size_t r = 0; r < pattern.size(); ++r) A.row_ptr[r + 1] = A.row_ptr[r] + pattern[r].size();
  A.cols.reserve(A.row_ptr.back());
  for (const auto& row : pattern) A.cols.insert(A.cols.end(), row.begin(), row.end());
  A.vals.assign(A.cols.size(), 0.0);
  return A;
}

void spmv(const CsrMatrix& A, std::span<const double> x, std::span<double> y, Exec exec) {
  const int n = A.rows;
  if (exec == Exec::Serial) {
    for (int r = 0; r < n; ++r) {
      double s = 0.0;
      for (std::size_t p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p) s += A.vals[p] * x[A.cols[p]];
      y[r] = s;
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p) s += A.vals[p] * x[A.cols[p]];
    y[r] = s;
  }
}

double dot(std::span<const double> a, std::span<const double> b, Exec exec) {
  const std::size_t n = a.size();
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks, 0.0);
  auto block_sum = [&](std::size_t blk) {
    const std::size_t lo = blk * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    partial[blk] = s;
  };
  if (exec == Exec::Serial) {
    for (std::size_t blk = 0; blk < nblocks; ++blk) block_sum(blk);
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(nblocks); ++blk) {
      block_sum(static_cast<std::size_t>(blk));
    }
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y, Exec exec) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += alpha * x[i];
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double symmetry_defect(const CsrMatrix& A) {
  double amax = 0.0;
  double dmax = 0.0;
  for (int r = 0; r < A.rows; ++r) {
    for (std::size_t p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p) {
      amax = std::max(amax, std::abs(A.vals[p]));
      dmax = std::max(dmax, std::abs(A.vals[p] - A.at(A.cols[p], r)));
    }
  }
  return amax > 0.0 ? dmax / amax : 0.0;
}

}  // namespace dgiga
