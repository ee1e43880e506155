#include "dgiga/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dgiga {

double determinant(const Mat3& J, int d) {
  if (d == 1) return J[0][0];
  if (d == 2) return J[0][0] * J[1][1] - J[0][1] * J[1][0];
  return J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
         J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
         J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
}

Mat3 inverse_transpose(const Mat3& J, double det, int d) {
  if (!(std::abs(det) > 1e-300)) {
    throw GeometryError("singular Jacobian");
  }
  Mat3 G{};
  const double inv = 1.0 / det;
  if (d == 1) {
    G[0][0] = inv;
  } else if (d == 2) {
    // (J^{-1})^T
    G[0][0] = J[1][1] * inv;
    G[0][1] = -J[1][0] * inv;
    G[1][0] = -J[0][1] * inv;
    G[1][1] = J[0][0] * inv;
  } else {
    // cofactor matrix / det
    G[0][0] = (J[1][1] * J[2][2] - J[1][2] * J[2][1]) * inv;
    G[0][1] = -(J[1][0] * J[2][2] - J[1][2] * J[2][0]) * inv;
    G[0][2] = (J[1][0] * J[2][1] - J[1][1] * J[2][0]) * inv;
    G[1][0] = -(J[0][1] * J[2][2] - J[0][2] * J[2][1]) * inv;
    G[1][1] = (J[0][0] * J[2][2] - J[0][2] * J[2][0]) * inv;
    G[1][2] = -(J[0][0] * J[2][1] - J[0][1] * J[2][0]) * inv;
    G[2][0] = (J[0][1] * J[1][2] - J[0][2] * J[1][1]) * inv;
    G[2][1] = -(J[0][0] * J[1][2] - J[0][2] * J[1][0]) * inv;
    G[2][2] = (J[0][0] * J[1][1] - J[0][1] * J[1][0]) * inv;
  }
  return G;
}

Vec3 mat_vec(const Mat3& A, const Vec3& v, int d) {
  Vec3 r{0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) r[a] += A[a][b] * v[b];
  }
  return r;
}

double dot(const Vec3& a, const Vec3& b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec3& a, int d) { return std::sqrt(dot(a, a, d)); }

// ---------------------------------------------------------------------------

Patch::Patch(TensorSpace space, std::vector<Vec3> control_points)
    : space_(std::move(space)), cps_(std::move(control_points)) {
  if (static_cast<int>(cps_.size()) != space_.size()) {
    std::ostringstream os;
    os << "patch has " << cps_.size() << " control points, space dimension is " << space_.size();
    throw GeometryError(os.str());
  }
}

int Patch::orientation(int npts) const {
  const int d = dim();
  int sign = 0;
  for (int e = 0; e < space_.num_elements(); ++e) {
    const auto box = space_.element_box(space_.element_multi(e));
    int total = 1;
    for (int i = 0; i < d; ++i) total *= npts;
    for (int q = 0; q < total; ++q) {
      Vec3 xh{0.0, 0.0, 0.0};
      int rem = q;
      for (int i = 0; i < d; ++i) {
        const double t = static_cast<double>(rem % npts) / (npts - 1);
        rem /= npts;
        xh[i] = box[i][0] + t * (box[i][1] - box[i][0]);
      }
      const double det = jacobian(xh).det;
      const int s = det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
      if (s == 0 || (sign != 0 && s != sign)) {
        std::ostringstream os;
        os << "Jacobian determinant changes sign or vanishes at parameter (" << xh[0] << ", " << xh[1];
        if (d == 3) os << ", " << xh[2];
        os << "), det = " << det;
        throw GeometryError(os.str());
      }
      sign = s;
    }
  }
  return sign;
}

Vec3 Patch::map_point(const Vec3& xhat) const {
  const ActiveSet act = tensor_eval(space_, xhat, false);
  Vec3 x{0.0, 0.0, 0.0};
  for (std::size_t a = 0; a < act.indices.size(); ++a) {
    const Vec3& c = cps_[act.indices[a]];
    for (int i = 0; i < dim(); ++i) x[i] += act.values[a] * c[i];
  }
  return x;
}

Vec3 Patch::map_with_jacobian(const Vec3& xhat, JacobianInfo& jac) const {
  const ActiveSet act = tensor_eval(space_, xhat, true);
  const int d = dim();
  Vec3 x{0.0, 0.0, 0.0};
  jac.J = Mat3{};
  for (std::size_t a = 0; a < act.indices.size(); ++a) {
    const Vec3& c = cps_[act.indices[a]];
    for (int i = 0; i < d; ++i) {
      x[i] += act.values[a] * c[i];
      for (int j = 0; j < d; ++j) jac.J[i][j] += c[i] * act.gradients[a][j];
    }
  }
  jac.det = determinant(jac.J, d);
  return x;
}

JacobianInfo Patch::jacobian(const Vec3& xhat) const {
  JacobianInfo jac;
  map_with_jacobian(xhat, jac);
  return jac;
}

namespace {

Vec3 clamp_unit(Vec3 v, int d) {
  for (int i = 0; i < d; ++i) v[i] = std::clamp(v[i], 0.0, 1.0);
  return v;
}

}  // namespace

Vec3 Patch::invert_point(const Vec3& x, const InvertOptions& opts) const {
  const int d = dim();
  auto residual_of = [&](const Vec3& xh, Vec3& r, JacobianInfo& jac) {
    const Vec3 y = map_with_jacobian(xh, jac);
    for (int i = 0; i < d; ++i) r[i] = x[i] - y[i];
    return norm(r, d);
  };

  auto newton = [&](Vec3 xh, double& final_res) {
    xh = clamp_unit(xh, d);
    Vec3 r{};
    JacobianInfo jac;
    double res = residual_of(xh, r, jac);
    for (int it = 0; it < opts.max_iter && res > opts.tol; ++it) {
      if (!(std::abs(jac.det) > 1e-300)) break;
      // step = J^{-1} r = G^T r with G = J^{-T}
      const Mat3 G = inverse_transpose(jac.J, jac.det, d);
      Vec3 step{0.0, 0.0, 0.0};
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) step[a] += G[b][a] * r[b];
      }
      double scale = 1.0;
      bool improved = false;
      for (int halving = 0; halving <= 10; ++halving) {
        Vec3 trial = xh;
        for (int i = 0; i < d; ++i) trial[i] += scale * step[i];
        trial = clamp_unit(trial, d);
        Vec3 rt{};
        JacobianInfo jt;
        const double res_t = residual_of(trial, rt, jt);
        if (res_t < res) {
          xh = trial;
          r = rt;
          jac = jt;
          res = res_t;
          improved = true;
          break;
        }
        scale *= 0.5;
      }
      if (!improved) break;
    }
    final_res = res;
    return xh;
  };

  Vec3 start = opts.initial_guess.value_or(Vec3{0.5, d > 1 ? 0.5 : 0.0, d > 2 ? 0.5 : 0.0});
  double res = 0.0;
  Vec3 best = newton(start, res);
  if (res <= opts.tol) return best;
  if (opts.multistart) {
    const double grid[3] = {0.1, 0.5, 0.9};
    const int count = d == 2 ? 9 : 27;
    for (int s = 0; s < count; ++s) {
      Vec3 g{grid[s % 3], grid[(s / 3) % 3], d > 2 ? grid[(s / 9) % 3] : 0.0};
      double r = 0.0;
      Vec3 cand = newton(g, r);
      if (r < res) {
        res = r;
        best = cand;
      }
      if (res <= opts.tol) return best;
    }
  }
  std::ostringstream os;
  os.precision(17);
  os << "point inversion failed: x = (" << x[0] << ", " << x[1];
  if (d > 2) os << ", " << x[2];
  os << "), residual " << res;
  throw InversionError(os.str());
}

Vec3 Patch::face_to_param(int face, const std::array<double, 2>& u) const {
  const int dir = face_direction(face);
  Vec3 xh{0.0, 0.0, 0.0};
  int t = 0;
  for (int i = 0; i < dim(); ++i) {
    if (i == dir) {
      xh[i] = face_side(face) == 0 ? 0.0 : 1.0;
    } else {
      xh[i] = u[t++];
    }
  }
  return xh;
}

std::array<double, 2> Patch::param_to_face(int face, const Vec3& xhat) const {
  const int dir = face_direction(face);
  std::array<double, 2> u{0.0, 0.0};
  int t = 0;
  for (int i = 0; i < dim(); ++i) {
    if (i != dir) u[t++] = xhat[i];
  }
  return u;
}

FacePoint Patch::face_point(int face, const std::array<double, 2>& u) const {
  if (face < 0 || face >= 2 * dim()) {
    throw DomainError("invalid face index");
  }
  const int d = dim();
  const int dir = face_direction(face);
  FacePoint fp;
  fp.xhat = face_to_param(face, u);
  JacobianInfo jac;
  fp.x = map_with_jacobian(fp.xhat, jac);
  const Mat3 G = inverse_transpose(jac.J, jac.det, d);
  // Nanson: n ds = det(J) J^{-T} e_dir dA; gradient of xhat_dir points into
  // increasing xhat_dir, i.e. outward on side 1.
  Vec3 g{G[0][dir], G[1][dir], G[2][dir]};
  const double gn = norm(g, d);
  fp.measure = std::abs(jac.det) * gn;
  if (!(fp.measure > 1e-300)) {
    throw GeometryError("degenerate face");
  }
  const double sign = face_side(face) == 1 ? 1.0 : -1.0;
  for (int i = 0; i < 3; ++i) fp.normal[i] = i < d ? sign * g[i] / gn : 0.0;
  return fp;
}

double Patch::box_diameter(const std::array<std::array<double, 2>, 3>& box) const {
  const int d = dim();
  const int nc = 1 << d;
  std::array<Vec3, 8> corners{};
  for (int c = 0; c < nc; ++c) {
    Vec3 xh{0.0, 0.0, 0.0};
    for (int i = 0; i < d; ++i) xh[i] = box[i][(c >> i) & 1];
    corners[c] = map_point(xh);
  }
  double diam = 0.0;
  for (int a = 0; a < nc; ++a) {
    for (int b = a + 1; b < nc; ++b) {
      Vec3 diff{};
      for (int i = 0; i < d; ++i) diff[i] = corners[a][i] - corners[b][i];
      diam = std::max(diam, norm(diff, d));
    }
  }
  return diam;
}

}  // namespace dgiga
