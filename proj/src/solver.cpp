#include "dgiga/solver.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace dgiga {

std::string to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::Auto: return "auto";
    case SolveMethod::CG: return "cg";
    case SolveMethod::DenseCholesky: return "dense";
    case SolveMethod::SparseCholesky: return "sparse";
  }
  return "?";
}

SolveMethod parse_solve_method(const std::string& s) {
  if (s == "auto") return SolveMethod::Auto;
  if (s == "cg") return SolveMethod::CG;
  if (s == "dense") return SolveMethod::DenseCholesky;
  if (s == "sparse") return SolveMethod::SparseCholesky;
  throw ParseError("unknown solver '" + s + "' (expected auto, cg, dense or sparse)");
}

double relative_residual(const CsrMatrix& A, const std::vector<double>& b, const std::vector<double>& x) {
  std::vector<double> r(b.size());
  spmv(A, x, r, Exec::Serial);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const double nb = std::sqrt(dot(b, b, Exec::Serial));
  const double nr = std::sqrt(dot(r, r, Exec::Serial));
  return nb > 0.0 ? nr / nb : nr;
}

SolveReport solve_cg(const CsrMatrix& A, const std::vector<double>& b, std::vector<double>& x,
                     const SolveOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = A.rows;
  if (static_cast<int>(b.size()) != n) throw DomainError("right-hand side size mismatch");
  if (static_cast<int>(x.size()) != n) x.assign(n, 0.0);
  const Exec ex = opts.exec;
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : 10 * std::max(n, 1);

  std::vector<double> dinv = A.diagonal();
  for (double& v : dinv) {
    if (!(v > 0.0)) throw IndefiniteError("non-positive diagonal entry; the interior penalty is too small");
    v = 1.0 / v;
  }
  std::vector<double> r(n);
  std::vector<double> z(n);
  std::vector<double> p(n);
  std::vector<double> q(n);
  spmv(A, x, r, ex);
  for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
  const double nb = std::sqrt(dot(b, b, ex));
  SolveReport rep;
  rep.method = SolveMethod::CG;
  if (nb == 0.0) {
    x.assign(n, 0.0);
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }
  double rel = std::sqrt(dot(r, r, ex)) / nb;
  rep.residual_history.push_back(rel);
  for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
  p = z;
  double rz = dot(r, z, ex);
  int it = 0;
  while (rel > opts.tol && it < max_iter) {
    spmv(A, p, q, ex);
    const double pq = dot(p, q, ex);
    if (!(pq > 0.0)) {
      std::ostringstream os;
      os << "negative curvature p^T A p = " << pq << " at CG iteration " << it
         << "; the system is not positive definite, the interior penalty is too small";
      throw IndefiniteError(os.str());
    }
    const double a = rz / pq;
    axpy(a, p, x, ex);
    axpy(-a, q, r, ex);
    ++it;
    rel = std::sqrt(dot(r, r, ex)) / nb;
    rep.residual_history.push_back(rel);
    for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    const double rz_new = dot(r, z, ex);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  rep.iterations = it;
  rep.rel_residual = rel;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (rel > opts.tol) {
    std::ostringstream os;
    os << "CG did not converge in " << it << " iterations (relative residual " << rel << ", tol "
       << opts.tol << ")";
    throw SolverError(os.str(), rep.residual_history);
  }
  return rep;
}

void cholesky_factor(std::vector<double>& M, int n) {
  for (int j = 0; j < n; ++j) {
    double* rj = &M[static_cast<std::size_t>(j) * n];
    double s = rj[j];
    for (int k = 0; k < j; ++k) s -= rj[k] * rj[k];
    if (!(s > 0.0)) {
      std::ostringstream os;
      os << "non-positive pivot " << s << " in row " << j
         << "; the system is not positive definite, the interior penalty is too small";
      throw IndefiniteError(os.str());
    }
    const double ljj = std::sqrt(s);
    rj[j] = ljj;
    for (int i = j + 1; i < n; ++i) {
      double* ri = &M[static_cast<std::size_t>(i) * n];
      double t = ri[j];
      for (int k = 0; k < j; ++k) t -= ri[k] * rj[k];
      ri[j] = t / ljj;
    }
  }
}

void cholesky_solve(const std::vector<double>& L, int n, std::vector<double>& x) {
  for (int i = 0; i < n; ++i) {
    double s = x[i];
    for (int k = 0; k < i; ++k) s -= L[static_cast<std::size_t>(i) * n + k] * x[k];
    x[i] = s / L[static_cast<std::size_t>(i) * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int k = i + 1; k < n; ++k) s -= L[static_cast<std::size_t>(k) * n + i] * x[k];
    x[i] = s / L[static_cast<std::size_t>(i) * n + i];
  }
}

SolveReport solve_dense(const CsrMatrix& A, const std::vector<double>& b, std::vector<double>& x) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = A.rows;
  if (static_cast<int>(b.size()) != n) throw DomainError("right-hand side size mismatch");
  std::vector<double> L = A.to_dense();
  cholesky_factor(L, n);
  x = b;
  cholesky_solve(L, n, x);
  SolveReport rep;
  rep.method = SolveMethod::DenseCholesky;
  rep.rel_residual = relative_residual(A, b, x);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

SolveReport solve_sparse_direct(const CsrMatrix& A, const std::vector<double>& b, std::vector<double>& x) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = A.rows;
  if (static_cast<int>(b.size()) != n) throw DomainError("right-hand side size mismatch");
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(A.nnz());
  for (int r = 0; r < n; ++r)
    for (std::size_t p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p) trip.emplace_back(r, A.cols[p], A.vals[p]);
  Eigen::SparseMatrix<double> M(n, n);
  M.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(M);
  if (ldlt.info() != Eigen::Success) throw SolverError("sparse factorization failed", {});
  const auto& D = ldlt.vectorD();
  for (int i = 0; i < n; ++i) {
    if (!(D[i] > 0.0)) {
      std::ostringstream os;
      os << "non-positive pivot " << D[i]
         << " in sparse factorization; the system is not positive definite, the interior penalty is too small";
      throw IndefiniteError(os.str());
    }
  }
  const Eigen::VectorXd sol = ldlt.solve(Eigen::Map<const Eigen::VectorXd>(b.data(), n));
  x.assign(sol.data(), sol.data() + n);
  SolveReport rep;
  rep.method = SolveMethod::SparseCholesky;
  rep.rel_residual = relative_residual(A, b, x);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

SolveReport solve(const CsrMatrix& A, const std::vector<double>& b, std::vector<double>& x,
                  const SolveOptions& opts) {
  switch (opts.method) {
    case SolveMethod::CG: return solve_cg(A, b, x, opts);
    case SolveMethod::DenseCholesky: return solve_dense(A, b, x);
    case SolveMethod::SparseCholesky: return solve_sparse_direct(A, b, x);
    case SolveMethod::Auto: break;
  }
  if (A.rows <= kDirectLimit) return solve_sparse_direct(A, b, x);
  try {
    return solve_cg(A, b, x, opts);
  } catch (const SolverError&) {
    return solve_sparse_direct(A, b, x);
  }
}

}  // namespace dgiga
