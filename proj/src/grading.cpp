#include "dgiga/grading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dgiga {

double choose_mu(double lambda, int k, std::optional<double> delta) {
  if (!(lambda > 0.0)) throw DomainError("singular exponent must be positive");
  if (k < 1) throw DomainError("degree must be >= 1");
  const double index = delta.value_or(lambda);
  if (!(index > 0.0)) throw DomainError("regularity index must be positive");
  return std::min(1.0, index / k);
}

std::vector<double> grade_knots_1d(int n, double mu, double s_star) {
  if (n < 1) throw DomainError("need at least one element");
  if (!(mu > 0.0 && mu <= 1.0)) throw DomainError("grading parameter must lie in (0,1]");
  if (!(s_star >= 0.0 && s_star <= 1.0)) throw DomainError("singular coordinate outside [0,1]");

  std::vector<double> b(n + 1);
  for (int j = 0; j <= n; ++j) b[j] = static_cast<double>(j) / static_cast<double>(n);
  if (mu == 1.0) return b;

  const double p = 1.0 / mu;
  std::vector<double> out;
  out.reserve(n + 2);
  if (s_star == 0.0) {
    for (int j = 0; j <= n; ++j) out.push_back(std::pow(b[j], p));
  } else if (s_star == 1.0) {
    for (int j = 0; j <= n; ++j) out.push_back(1.0 - std::pow(b[n - j], p));
  } else {
    const int nl = n == 1 ? 1 : std::clamp(static_cast<int>(std::lround(n * s_star)), 1, n - 1);
    const int nr = n == 1 ? 1 : n - nl;
    for (int j = 0; j < nl; ++j) {
      out.push_back(s_star - s_star * std::pow(static_cast<double>(nl - j) / nl, p));
    }
    out.push_back(s_star);
    for (int j = 1; j <= nr; ++j) {
      out.push_back(s_star + (1.0 - s_star) * std::pow(static_cast<double>(j) / nr, p));
    }
    out.front() = 0.0;
    out.back() = 1.0;
  }
  return out;
}

TensorSpace graded_space(int dim, int degree, int n, double mu, const SingularParam& s_star) {
  std::vector<KnotVector> dirs;
  for (int d = 0; d < dim; ++d) {
    if (s_star[d]) {
      const auto b = grade_knots_1d(n, mu, *s_star[d]);
      dirs.push_back(KnotVector::from_breakpoints(degree, b));
    } else {
      dirs.push_back(KnotVector::uniform(degree, n));
    }
  }
  return TensorSpace(std::move(dirs));
}

std::optional<SingularParam> singular_preimage(const Patch& patch, const Vec3& point,
                                               const std::array<bool, 3>& graded_dirs, double tol,
                                               double snap) {
  InvertOptions opts;
  opts.tol = tol;
  opts.multistart = true;
  Vec3 xh;
  try {
    xh = patch.invert_point(point, opts);
  } catch (const InversionError&) {
    return std::nullopt;
  }
  SingularParam s{};
  const int dim = std::min(patch.dim(), 3);
  for (int d = 0; d < dim; ++d) {
    if (!graded_dirs[d]) continue;
    double v = xh[d];
    if (v < snap) v = 0.0;
    if (v > 1.0 - snap) v = 1.0;
    s[d] = v;
  }
  return s;
}

ZoneSizes zone_mesh_sizes(double h, double mu, int nu, std::span<const int> n_zeta, double R,
                          ZoneDivisor divisor) {
  if (!(h > 0.0) || !(R > 0.0)) throw DomainError("zone sizes need h > 0 and R > 0");
  if (!(mu > 0.0 && mu <= 1.0)) throw DomainError("grading parameter must lie in (0,1]");
  const double LU = R / h;
  if (LU < 2.0) throw DomainError("zone area radius must be at least 2h");
  if (nu < 1 || !(nu < LU - 1.0)) throw DomainError("zone increment must satisfy 1 <= nu < L_U - 1");
  const double p = 1.0 / mu;
  const double div_raw = divisor == ZoneDivisor::InvMuPower ? std::pow(nu, p) : std::pow(nu, -mu);
  const double div = std::round(div_raw);
  if (div < 1.0) throw DomainError("zone subdivision count rounds to zero");

  ZoneSizes z;
  z.C = std::pow(R, 1.0 - p);
  for (int nz : n_zeta) {
    if (nz < 0 || !(nz < LU)) throw DomainError("zone index must satisfy 0 <= n_zeta < L_U");
    const double outer = z.C * std::pow((nz + nu) * h, p);
    const double inner = z.C * std::pow(nz * h, p);
    const double size = (outer - inner) / div;
    z.size.push_back(size);
    z.distance.push_back(inner);
    z.radius.push_back(outer - inner);
    if (nz == 0) {
      z.upper_ratio.push_back(size / std::pow(h, p));
      z.lower_ratio.push_back(std::numeric_limits<double>::quiet_NaN());
    } else {
      z.upper_ratio.push_back(size / (h * std::pow(inner, 1.0 - mu)));
      z.lower_ratio.push_back(size / (h * std::pow(outer - inner, 1.0 - mu)));
    }
  }
  return z;
}

}  // namespace dgiga
