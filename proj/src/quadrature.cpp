#include "dgiga/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dgiga {

GaussRule1d gauss_legendre(int npts) {
  if (npts < 1) throw DomainError("Gauss rule needs at least one point");
  GaussRule1d r;
  r.points.resize(npts);
  r.weights.resize(npts);
  const int n = npts;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node
    {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    // map [-1,1] -> [0,1]
    r.points[i] = 0.5 * (1.0 - z);
    r.points[n - 1 - i] = 0.5 * (1.0 + z);
    r.weights[i] = 0.5 * w;
    r.weights[n - 1 - i] = 0.5 * w;
  }
  return r;
}

QuadRule tensor_rule(int npts, int dim) {
  const GaussRule1d g = gauss_legendre(npts);
  QuadRule q;
  q.dim = dim;
  q.order = 2 * npts - 1;
  int total = 1;
  for (int d = 0; d < dim; ++d) total *= npts;
  q.points.resize(total);
  q.weights.resize(total);
  for (int a = 0; a < total; ++a) {
    int rem = a;
    Vec3 p{0.0, 0.0, 0.0};
    double w = 1.0;
    for (int d = 0; d < dim; ++d) {
      const int i = rem % npts;
      rem /= npts;
      p[d] = g.points[i];
      w *= g.weights[i];
    }
    q.points[a] = p;
    q.weights[a] = w;
  }
  return q;
}

QuadRule element_rule(int k, int dim) {
  if (k < 1) throw DomainError("degree must be >= 1");
  return tensor_rule(k + 1, dim);
}

std::vector<double> merge_breakpoints(std::span<const double> a, std::span<const double> b,
                                      double tol) {
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double v : all) {
    if (out.empty() || v - out.back() > tol) out.push_back(v);
  }
  return out;
}

namespace {

int element_of(const KnotVector& kv, double lo, double hi) {
  return kv.find_element(0.5 * (lo + hi));
}

}  // namespace

FaceRule interface_rule(const Patch& patch_a, const TensorSpace& space_a, const Patch& patch_b,
                        const TensorSpace& space_b, const InterfaceSpec& spec, int npts) {
  const int d = patch_a.dim();
  const int nt = d - 1;
  const int dir_a = face_direction(spec.face_a);
  const int dir_b = face_direction(spec.face_b);
  std::array<int, 2> tan_a{0, 0};
  std::array<int, 2> tan_b{0, 0};
  for (int i = 0, t = 0; i < d; ++i)
    if (i != dir_a) tan_a[t++] = i;
  for (int i = 0, t = 0; i < d; ++i)
    if (i != dir_b) tan_b[t++] = i;

  // merged partition in face-a coordinates
  std::array<std::vector<double>, 2> merged;
  for (int m = 0; m < nt; ++m) {
    // face-b slot that is fed by face-a slot m
    int mb = 0;
    for (int s = 0; s < nt; ++s)
      if (spec.orient.source_slot(s) == m) mb = s;
    std::vector<double> from_b = space_b.knots(tan_b[mb]).breakpoints();
    if (spec.orient.flip[mb]) {
      for (double& v : from_b) v = 1.0 - v;
      std::reverse(from_b.begin(), from_b.end());
    }
    merged[m] = merge_breakpoints(space_a.knots(tan_a[m]).breakpoints(), from_b);
  }

  const GaussRule1d g = gauss_legendre(npts);
  FaceRule rule;
  rule.is_interface = true;
  rule.patch_a = spec.patch_a;
  rule.face_a = spec.face_a;
  rule.patch_b = spec.patch_b;
  rule.face_b = spec.face_b;

  const int n0 = static_cast<int>(merged[0].size()) - 1;
  const int n1 = nt > 1 ? static_cast<int>(merged[1].size()) - 1 : 1;
  const int pts_per_cell = nt > 1 ? npts * npts : npts;
  for (int c1 = 0; c1 < n1; ++c1) {
    for (int c0 = 0; c0 < n0; ++c0) {
      std::array<std::array<double, 2>, 2> box{};
      box[0] = {merged[0][c0], merged[0][c0 + 1]};
      if (nt > 1) box[1] = {merged[1][c1], merged[1][c1 + 1]};
      FaceCell cell;
      std::array<double, 2> mid{0.5 * (box[0][0] + box[0][1]),
                                nt > 1 ? 0.5 * (box[1][0] + box[1][1]) : 0.0};
      // elements on both sides
      for (int m = 0; m < nt; ++m) {
        cell.elem_a[tan_a[m]] = element_of(space_a.knots(tan_a[m]), box[m][0], box[m][1]);
      }
      cell.elem_a[dir_a] = face_side(spec.face_a) == 0 ? 0 : space_a.num_elements(dir_a) - 1;
      const std::array<double, 2> mid_b = spec.orient.apply(mid);
      for (int m = 0; m < nt; ++m) {
        cell.elem_b[tan_b[m]] = space_b.knots(tan_b[m]).find_element(mid_b[m]);
      }
      cell.elem_b[dir_b] = face_side(spec.face_b) == 0 ? 0 : space_b.num_elements(dir_b) - 1;

      const double cell_measure = (box[0][1] - box[0][0]) * (nt > 1 ? box[1][1] - box[1][0] : 1.0);
      cell.points.reserve(pts_per_cell);
      for (int q = 0; q < pts_per_cell; ++q) {
        const int q0 = q % npts;
        const int q1 = q / npts;
        std::array<double, 2> u{box[0][0] + g.points[q0] * (box[0][1] - box[0][0]), 0.0};
        double w = g.weights[q0];
        if (nt > 1) {
          u[1] = box[1][0] + g.points[q1] * (box[1][1] - box[1][0]);
          w *= g.weights[q1];
        }
        const FacePoint fp = patch_a.face_point(spec.face_a, u);
        FaceQuadPoint qp;
        qp.xhat_a = fp.xhat;
        qp.x = fp.x;
        qp.normal = fp.normal;
        qp.weight = w * cell_measure * fp.measure;
        InvertOptions opts;
        opts.initial_guess = patch_b.face_to_param(spec.face_b, spec.orient.apply(u));
        opts.tol = 1e-12;
        try {
          qp.xhat_b = patch_b.invert_point(qp.x, opts);
        } catch (const InversionError& e) {
          std::ostringstream os;
          os << "interface (patch " << spec.patch_a << " face " << spec.face_a << ") -> (patch "
             << spec.patch_b << " face " << spec.face_b << "): " << e.what();
          throw InversionError(os.str());
        }
        // keep the point exactly on the face of side b
        qp.xhat_b[dir_b] = face_side(spec.face_b) == 0 ? 0.0 : 1.0;
        cell.points.push_back(qp);
      }
      rule.cells.push_back(std::move(cell));
    }
  }
  return rule;
}

FaceRule boundary_rule(const Patch& patch, const TensorSpace& space, int patch_id, int face,
                       int npts) {
  const int d = patch.dim();
  const int nt = d - 1;
  const int dir = face_direction(face);
  std::array<int, 2> tan{0, 0};
  for (int i = 0, t = 0; i < d; ++i)
    if (i != dir) tan[t++] = i;
  const GaussRule1d g = gauss_legendre(npts);

  FaceRule rule;
  rule.patch_a = patch_id;
  rule.face_a = face;
  const auto& b0 = space.knots(tan[0]).breakpoints();
  const int n0 = static_cast<int>(b0.size()) - 1;
  const int n1 = nt > 1 ? space.num_elements(tan[1]) : 1;
  const int pts_per_cell = nt > 1 ? npts * npts : npts;
  for (int c1 = 0; c1 < n1; ++c1) {
    for (int c0 = 0; c0 < n0; ++c0) {
      std::array<std::array<double, 2>, 2> box{};
      box[0] = {b0[c0], b0[c0 + 1]};
      if (nt > 1) box[1] = {space.knots(tan[1]).breakpoints()[c1], space.knots(tan[1]).breakpoints()[c1 + 1]};
      FaceCell cell;
      cell.elem_a[tan[0]] = c0;
      if (nt > 1) cell.elem_a[tan[1]] = c1;
      cell.elem_a[dir] = face_side(face) == 0 ? 0 : space.num_elements(dir) - 1;
      const double cell_measure = (box[0][1] - box[0][0]) * (nt > 1 ? box[1][1] - box[1][0] : 1.0);
      for (int q = 0; q < pts_per_cell; ++q) {
        const int q0 = q % npts;
        const int q1 = q / npts;
        std::array<double, 2> u{box[0][0] + g.points[q0] * (box[0][1] - box[0][0]), 0.0};
        double w = g.weights[q0];
        if (nt > 1) {
          u[1] = box[1][0] + g.points[q1] * (box[1][1] - box[1][0]);
          w *= g.weights[q1];
        }
        const FacePoint fp = patch.face_point(face, u);
        FaceQuadPoint qp;
        qp.xhat_a = fp.xhat;
        qp.x = fp.x;
        qp.normal = fp.normal;
        qp.weight = w * cell_measure * fp.measure;
        cell.points.push_back(qp);
      }
      rule.cells.push_back(std::move(cell));
    }
  }
  return rule;
}

}  // namespace dgiga
