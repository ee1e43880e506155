#pragma once

// A priori mesh grading toward a singular point. Knots of the discretization
// space are relocated inside each patch by a power-law map; the explicit
// ring-zone sizes are kept as a validation tool.

#include <optional>
#include <span>
#include <vector>

#include "dgiga/geometry.hpp"
#include "dgiga/spline.hpp"

namespace dgiga {

/// Grading exponent mu in (0,1] that balances the singular exponent against
/// the degree: mu = lambda/k, or delta/k when a Sobolev index delta is
/// supplied. Values >= 1 are clamped to 1 (no grading).
double choose_mu(double lambda, int k, std::optional<double> delta = std::nullopt);

/// Breakpoints of an n-element mesh pulled toward s_star by
/// g(t) = |t - s_star|^{1/mu}, rescaled to fix 0, s_star and 1. An interior
/// s_star becomes a breakpoint and the two sides get round(n s_star) and the
/// remaining elements (at least one each), graded independently.
/// mu == 1 returns j/n exactly.
std::vector<double> grade_knots_1d(int n, double mu, double s_star);

/// Per-direction parametric pre-image of the singular point; nullopt for
/// directions that are not graded.
using SingularParam = std::array<std::optional<double>, 3>;

/// Degree-k space with n elements per direction, graded toward s_star where
/// given and uniform elsewhere.
TensorSpace graded_space(int dim, int degree, int n, double mu, const SingularParam& s_star);

/// Pre-image of a physical singular point in a patch, or nullopt if the
/// point is outside the patch closure. Coordinates within `snap` of 0 or 1
/// are snapped so that the grading stays anchored at the patch corner.
std::optional<SingularParam> singular_preimage(const Patch& patch, const Vec3& point,
                                               const std::array<bool, 3>& graded_dirs,
                                               double tol = 1e-10, double snap = 1e-8);

/// How the zone subdivision count int(.) is read. The default uses
/// nearest-int(nu^{1/mu}); the alternative uses nearest-int(nu^{-mu}).
enum class ZoneDivisor { InvMuPower, NegMuPower };

struct ZoneSizes {
  double C = 0.0;                 ///< R^{1 - 1/mu}
  std::vector<double> size;       ///< h_{i_zeta}
  std::vector<double> distance;   ///< D(Z_zeta, P_s) = C (n_zeta h)^{1/mu}
  std::vector<double> radius;     ///< R_{Z_zeta}
  /// h_zeta / h^{1/mu} for the zone touching P_s (n_zeta == 0), otherwise
  /// h_zeta / (h D^{1-mu}); a bounded ratio across h confirms the scaling law.
  std::vector<double> upper_ratio;
  /// h_zeta / (h R_Z^{1-mu}) for zones away from P_s (NaN at n_zeta == 0).
  std::vector<double> lower_ratio;
};

ZoneSizes zone_mesh_sizes(double h, double mu, int nu, std::span<const int> n_zeta, double R,
                          ZoneDivisor divisor = ZoneDivisor::InvMuPower);

}  // namespace dgiga
