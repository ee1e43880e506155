#pragma once

// Benchmark problems with known exact solutions.
//
// Angles: for the re-entrant corner cases (heart, L-shape) theta is measured
// counterclockwise from the -y direction, so that u = r^lambda sin(lambda
// theta) vanishes on both legs of the corner:
//
//         y
//         |  domain
//   ------+------ x        theta = 0      along -y
//   exterior |             theta = 3pi/2  along -x
//         |
//
// The branch cut runs through the exterior quadrant (-x, -y).

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dgiga/assembly.hpp"
#include "dgiga/multipatch.hpp"

namespace dgiga {

using VectorField = std::function<Vec3(const Vec3&)>;

struct KelloggParams {
  double lambda = 0.0;
  double rho = 0.0;
  double sigma = 0.0;
  double R = 0.0;  ///< alpha_13 / alpha_24

  /// The three tangent/cotangent relations, each written as lhs - rhs.
  std::array<double, 3> residuals() const;
  /// The bracket inequalities on lambda, rho and sigma.
  bool in_bracket() const;
  /// Angular part phi(theta) for theta in [0, 2pi] and its derivative.
  double phi(double theta) const;
  double dphi(double theta) const;
};

/// Solves the three relations for (rho, sigma, R) by damped Newton, keeping
/// every iterate inside the bracket. Throws DomainError for lambda outside
/// (0,1) and Error when the iteration fails.
KelloggParams solve_kellogg(double lambda);

struct BenchmarkCase {
  std::string name;
  std::string description;
  MultiPatch geometry;
  ScalarField exact_u;
  VectorField exact_grad;
  ScalarField source;
  double lambda = 0.0;
  /// Regularity index used by choose_mu when it differs from lambda.
  std::optional<double> delta;
  std::optional<Vec3> singular_point;
  /// Parametric directions graded toward the singular point.
  std::array<bool, 3> graded_dirs{true, true, true};
  /// (k, mu) pairs used for the graded runs.
  std::vector<std::pair<int, double>> recommended;
  std::optional<KelloggParams> kellogg;

  ScalarField dirichlet() const { return exact_u; }
};

BenchmarkCase heart2d_case();
BenchmarkCase kellogg_case(double lambda = 0.4);
BenchmarkCase cube_case();
BenchmarkCase lshape3d_case();
BenchmarkCase heart3d_case();
/// sin(pi x) sin(pi y) on the unit square split into two patches.
BenchmarkCase smooth2d_case();

std::vector<std::string> case_names();
/// Throws DomainError listing the available names.
BenchmarkCase make_case(const std::string& name);

/// Geometry plus metadata in the multipatch file format.
MultiPatchFile case_to_file(const BenchmarkCase& c);

/// Re-entrant corner angle in [0, 3pi/2 + pi/4): counterclockwise from -y,
/// branch cut along the exterior bisector.
double corner_angle(double x, double y);

}  // namespace dgiga
