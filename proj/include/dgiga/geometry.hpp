#pragma once

#include <array>
#include <optional>
#include <vector>

#include "dgiga/spline.hpp"

namespace dgiga {

using Mat3 = std::array<Vec3, 3>;  ///< row-major, J[a][b] = dPhi_a / dxhat_b

struct JacobianInfo {
  Mat3 J{};
  double det = 0.0;
};

/// Parametric faces are numbered 2*dir + side, side 0 at xhat_dir = 0.
constexpr int face_direction(int face) { return face / 2; }
constexpr int face_side(int face) { return face % 2; }

/// Point on a patch face with the data needed for surface integrals.
struct FacePoint {
  Vec3 xhat{};     ///< full parametric point
  Vec3 x{};        ///< physical point
  Vec3 normal{};   ///< outward unit normal
  double measure;  ///< surface Jacobian ds / d(face parameters)
};

struct InvertOptions {
  double tol = 1e-12;
  int max_iter = 50;
  std::optional<Vec3> initial_guess;
  bool multistart = false;  ///< retry from a 3^d grid of starting points
};

/// B-spline geometry map of one subdomain.
class Patch {
 public:
  Patch(TensorSpace space, std::vector<Vec3> control_points);

  int dim() const { return space_.dim(); }
  const TensorSpace& space() const { return space_; }
  const std::vector<Vec3>& control_points() const { return cps_; }

  Vec3 map_point(const Vec3& xhat) const;
  JacobianInfo jacobian(const Vec3& xhat) const;
  /// Map and Jacobian in one basis evaluation.
  Vec3 map_with_jacobian(const Vec3& xhat, JacobianInfo& jac) const;

  /// Damped Newton inversion, iterates clamped to [0,1]^d.
  Vec3 invert_point(const Vec3& x, const InvertOptions& opts = {}) const;

  /// Face point from d-1 face coordinates (tangential directions in
  /// increasing order).
  FacePoint face_point(int face, const std::array<double, 2>& u) const;
  /// Full parametric point of face coordinates.
  Vec3 face_to_param(int face, const std::array<double, 2>& u) const;
  std::array<double, 2> param_to_face(int face, const Vec3& xhat) const;

  /// Max pairwise distance of the mapped corners of a parametric box.
  double box_diameter(const std::array<std::array<double, 2>, 3>& box) const;

  /// Sign of det J, checked on a closed npts^d grid (corners included) in
  /// every element of the geometry mesh. Throws GeometryError with the location if
  /// the sign changes or det J vanishes.
  int orientation(int npts = 9) const;

 private:
  TensorSpace space_;
  std::vector<Vec3> cps_;
};

// Small dense helpers used throughout assembly.
double determinant(const Mat3& J, int d);
/// Inverse transpose; throws GeometryError if |det| is tiny.
Mat3 inverse_transpose(const Mat3& J, double det, int d);
Vec3 mat_vec(const Mat3& A, const Vec3& v, int d);
double dot(const Vec3& a, const Vec3& b, int d);
double norm(const Vec3& a, int d);

}  // namespace dgiga
