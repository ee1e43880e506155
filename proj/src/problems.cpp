#include "dgiga/problems.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace dgiga {

namespace {

constexpr double kPi = std::numbers::pi;

Patch make_patch(int dim, int degree, std::vector<Vec3> controls) {
  std::vector<KnotVector> dirs;
  for (int d = 0; d < dim; ++d) dirs.push_back(KnotVector::uniform(degree, 1));
  return Patch(TensorSpace(std::move(dirs)), std::move(controls));
}

MultiPatch make_multipatch(std::vector<Patch> patches, std::vector<double> alpha) {
  auto itf = detect_interfaces(patches);
  return MultiPatch(std::move(patches), std::move(alpha), std::move(itf));
}

/// Gradient of r^lambda Phi(theta) where theta = atan2(y, x) + const.
Vec3 polar_grad(const Vec3& x, double lambda, double phi, double dphi) {
  const double r2 = x[0] * x[0] + x[1] * x[1];
  if (r2 == 0.0) return {0.0, 0.0, 0.0};
  const double r = std::sqrt(r2);
  const double rl = std::pow(r, lambda);
  return {(lambda * phi * x[0] - dphi * x[1]) * rl / r2, (lambda * phi * x[1] + dphi * x[0]) * rl / r2, 0.0};
}

const std::array<Vec3, 9> kHeart1 = {{{0.00, 0.00, 0.0},
                                      {0.49, 0.49, 0.0},
                                      {0.97, 0.97, 0.0},
                                      {0.00, -0.81, 0.0},
                                      {0.46, -0.16, 0.0},
                                      {1.00, 0.94, 0.0},
                                      {0.35, -0.84, 0.0},
                                      {0.71, -0.84, 0.0},
                                      {0.85, 0.0, 0.0}}};
const std::array<Vec3, 9> kHeart2 = {{{0.00, 0.00, 0.0},
                                      {0.49, 0.49, 0.0},
                                      {0.97, 0.97, 0.0},
                                      {-0.81, 0.00, 0.0},
                                      {-0.16, 0.46, 0.0},
                                      {0.94, 1.00, 0.0},
                                      {-0.84, 0.35, 0.0},
                                      {-0.84, 0.71, 0.0},
                                      {0.0, 0.85, 0.0}}};

void set_corner_solution(BenchmarkCase& c) {
  const double lam = 2.0 / 3.0;
  c.lambda = lam;
  c.exact_u = [lam](const Vec3& x) {
    const double r = std::hypot(x[0], x[1]);
    return std::pow(r, lam) * std::sin(lam * corner_angle(x[0], x[1]));
  };
  c.exact_grad = [lam](const Vec3& x) {
    const double t = corner_angle(x[0], x[1]);
    return polar_grad(x, lam, std::sin(lam * t), lam * std::cos(lam * t));
  };
  c.source = [](const Vec3&) { return 0.0; };
  c.singular_point = Vec3{0.0, 0.0, 0.0};
}

}  // namespace

double corner_angle(double x, double y) {
  double a = std::atan2(y, x);
  if (a < -0.75 * kPi) a += 2.0 * kPi;
  return a + 0.5 * kPi;
}

// ---------------------------------------------------------------------------

std::array<double, 3> KelloggParams::residuals() const {
  const double l = lambda;
  return {R + std::tan((0.5 * kPi - sigma) * l) / std::tan(rho * l),
          1.0 / R + std::tan(rho * l) / std::tan(sigma * l),
          R + std::tan(sigma * l) / std::tan((0.5 * kPi - rho) * l)};
}

bool KelloggParams::in_bracket() const {
  const double l = lambda;
  if (!(l > 0.0 && l < 2.0)) return false;
  const double a = 2.0 * l * rho;
  const double b = -2.0 * l * sigma;
  return std::max(0.0, kPi * l - kPi) < a && a < std::min(kPi * l, kPi) && std::max(0.0, kPi - kPi * l) < b &&
         b < std::min(kPi, 2.0 * kPi - l * kPi);
}

double KelloggParams::phi(double t) const {
  const double l = lambda;
  if (t < 0.5 * kPi) return std::cos((0.5 * kPi - sigma) * l) * std::cos((t - 0.5 * kPi + rho) * l);
  if (t < kPi) return std::cos(rho * l) * std::cos((t - kPi + sigma) * l);
  if (t < 1.5 * kPi) return std::cos(sigma * l) * std::cos((t - kPi - rho) * l);
  return std::cos((0.5 * kPi - rho) * l) * std::cos((t - 1.5 * kPi - sigma) * l);
}

double KelloggParams::dphi(double t) const {
  const double l = lambda;
  if (t < 0.5 * kPi) return -l * std::cos((0.5 * kPi - sigma) * l) * std::sin((t - 0.5 * kPi + rho) * l);
  if (t < kPi) return -l * std::cos(rho * l) * std::sin((t - kPi + sigma) * l);
  if (t < 1.5 * kPi) return -l * std::cos(sigma * l) * std::sin((t - kPi - rho) * l);
  return -l * std::cos((0.5 * kPi - rho) * l) * std::sin((t - 1.5 * kPi - sigma) * l);
}

KelloggParams solve_kellogg(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("Kellogg exponent must lie in (0,1)");
  KelloggParams p;
  p.lambda = lambda;
  // start near the symmetric parameter family, perturbed off the root
  p.rho = 0.25 * kPi * 1.05;
  p.sigma = (0.25 * kPi - 0.5 * kPi / lambda) * 0.97;
  p.R = 1.0 / std::pow(std::tan(0.25 * kPi * lambda), 2) * 1.1;
  auto norm3 = [](const std::array<double, 3>& r) { return std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]); };
  if (!p.in_bracket()) throw Error("Kellogg start point violates the bracket constraints");
  double res = norm3(p.residuals());
  for (int it = 0; it < 100 && res > 1e-14; ++it) {
    // central-difference Jacobian in (rho, sigma, R)
    double J[3][3];
    const double x0[3] = {p.rho, p.sigma, p.R};
    for (int j = 0; j < 3; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(x0[j]));
      KelloggParams a = p;
      KelloggParams b = p;
      double* pa[3] = {&a.rho, &a.sigma, &a.R};
      double* pb[3] = {&b.rho, &b.sigma, &b.R};
      *pa[j] += h;
      *pb[j] -= h;
      const auto ra = a.residuals();
      const auto rb = b.residuals();
      for (int i = 0; i < 3; ++i) J[i][j] = (ra[i] - rb[i]) / (2.0 * h);
    }
    const auto r = p.residuals();
    // Cramer's rule for the 3x3 step
    auto det3 = [](double M[3][3]) {
      return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
             M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    };
    const double D = det3(J);
    if (!(std::abs(D) > 1e-300)) break;
    double step[3];
    for (int c = 0; c < 3; ++c) {
      double M[3][3];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M[i][j] = j == c ? -r[i] : J[i][j];
      step[c] = det3(M) / D;
    }
    double t = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half, t *= 0.5) {
      KelloggParams q = p;
      q.rho += t * step[0];
      q.sigma += t * step[1];
      q.R += t * step[2];
      if (!q.in_bracket() || !(q.R > 0.0)) continue;
      const double rq = norm3(q.residuals());
      if (rq < res) {
        p = q;
        res = rq;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!(res <= 1e-11)) {
    std::ostringstream os;
    os.precision(17);
    os << "Kellogg parameter solve failed for lambda = " << lambda << ": residual " << res << " at rho = " << p.rho
       << ", sigma = " << p.sigma << ", R = " << p.R << "; bracket: max(0, pi l - pi) < 2 l rho < min(pi l, pi), "
       << "max(0, pi - pi l) < -2 l sigma < min(pi, 2 pi - l pi)";
    throw Error(os.str());
  }
  return p;
}

// ---------------------------------------------------------------------------

BenchmarkCase heart2d_case() {
  BenchmarkCase c;
  c.name = "heart2d";
  c.description = "heart-shaped domain, re-entrant corner omega = 3pi/2, two degree-2 patches";
  std::vector<Patch> patches;
  patches.push_back(make_patch(2, 2, {kHeart1.begin(), kHeart1.end()}));
  patches.push_back(make_patch(2, 2, {kHeart2.begin(), kHeart2.end()}));
  c.geometry = make_multipatch(std::move(patches), {1.0, 1.0});
  set_corner_solution(c);
  c.graded_dirs = {true, true, false};
  c.recommended = {{1, 0.6}, {2, 0.3}};
  return c;
}

BenchmarkCase kellogg_case(double lambda) {
  const KelloggParams kp = solve_kellogg(lambda);
  BenchmarkCase c;
  c.name = "kellogg";
  c.description = "checkerboard diffusion on (-1,1)^2, four quadrant patches";
  std::vector<Patch> patches;
  std::vector<double> alpha;
  // quadrants 1..4 counterclockwise; alpha_13 = R, alpha_24 = 1
  const double ox[4] = {0.0, -1.0, -1.0, 0.0};
  const double oy[4] = {0.0, 0.0, -1.0, -1.0};
  for (int q = 0; q < 4; ++q) {
    std::vector<Vec3> cp;
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) cp.push_back({ox[q] + i, oy[q] + j, 0.0});
    patches.push_back(make_patch(2, 1, std::move(cp)));
    alpha.push_back(q % 2 == 0 ? kp.R : 1.0);
  }
  c.geometry = make_multipatch(std::move(patches), std::move(alpha));
  c.lambda = lambda;
  c.kellogg = kp;
  auto angle = [](const Vec3& x) {
    double t = std::atan2(x[1], x[0]);
    if (t < 0.0) t += 2.0 * kPi;
    return t;
  };
  c.exact_u = [kp, angle](const Vec3& x) {
    return std::pow(std::hypot(x[0], x[1]), kp.lambda) * kp.phi(angle(x));
  };
  c.exact_grad = [kp, angle](const Vec3& x) {
    const double t = angle(x);
    return polar_grad(x, kp.lambda, kp.phi(t), kp.dphi(t));
  };
  c.source = [](const Vec3&) { return 0.0; };
  c.singular_point = Vec3{0.0, 0.0, 0.0};
  c.graded_dirs = {true, true, false};
  c.recommended = {{1, 0.4}, {2, 0.2}};
  return c;
}

BenchmarkCase cube_case() {
  BenchmarkCase c;
  c.name = "cube";
  c.description = "u = |x|^0.85 on (-1,1)^3, eight cube patches meeting at the origin";
  std::vector<Patch> patches;
  for (int oz = -1; oz <= 0; ++oz)
    for (int oy = -1; oy <= 0; ++oy)
      for (int ox = -1; ox <= 0; ++ox) {
        std::vector<Vec3> cp;
        for (int k = 0; k < 2; ++k)
          for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 2; ++i) cp.push_back({double(ox + i), double(oy + j), double(oz + k)});
        patches.push_back(make_patch(3, 1, std::move(cp)));
      }
  c.geometry = make_multipatch(std::move(patches), std::vector<double>(8, 1.0));
  const double lam = 0.85;
  c.lambda = lam;
  c.delta = 1.0;
  c.exact_u = [lam](const Vec3& x) { return std::pow(std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]), lam); };
  c.exact_grad = [lam](const Vec3& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    if (r2 == 0.0) return Vec3{0.0, 0.0, 0.0};
    const double s = lam * std::pow(r2, 0.5 * lam - 1.0);
    return Vec3{s * x[0], s * x[1], s * x[2]};
  };
  c.source = [lam](const Vec3& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    return -lam * (lam + 1.0) * std::pow(r2, 0.5 * lam - 1.0);
  };
  c.singular_point = Vec3{0.0, 0.0, 0.0};
  c.graded_dirs = {true, true, true};
  c.recommended = {{1, 1.0}, {2, 0.6}, {3, 0.4}};
  return c;
}

BenchmarkCase lshape3d_case() {
  BenchmarkCase c;
  c.name = "lshape3d";
  c.description = "((-1,1)^2 minus (-1,0)^2) x [0,1], two patches split along the corner bisector";
  // patch 0 below the diagonal y = x, patch 1 its mirror image
  const std::array<std::array<double, 2>, 4> a = {{{0.0, 0.0}, {1.0, 1.0}, {0.0, -1.0}, {1.0, -1.0}}};
  std::vector<Patch> patches;
  for (int m = 0; m < 2; ++m) {
    std::vector<Vec3> cp;
    for (int k = 0; k < 2; ++k)
      for (const auto& q : a) cp.push_back(m == 0 ? Vec3{q[0], q[1], double(k)} : Vec3{q[1], q[0], double(k)});
    patches.push_back(make_patch(3, 1, std::move(cp)));
  }
  c.geometry = make_multipatch(std::move(patches), {1.0, 1.0});
  set_corner_solution(c);
  c.singular_point = Vec3{0.0, 0.0, 0.5};
  c.graded_dirs = {true, true, false};
  c.recommended = {{1, 0.6}, {2, 0.3}};
  return c;
}

BenchmarkCase heart3d_case() {
  BenchmarkCase c;
  c.name = "heart3d";
  c.description = "heart cross-section extruded over z in [0,1], two degree-2 patches";
  std::vector<Patch> patches;
  for (const auto* src : {&kHeart1, &kHeart2}) {
    std::vector<Vec3> cp;
    for (int k = 0; k < 3; ++k)
      for (const Vec3& q : *src) cp.push_back({q[0], q[1], 0.5 * k});
    patches.push_back(make_patch(3, 2, std::move(cp)));
  }
  c.geometry = make_multipatch(std::move(patches), {1.0, 1.0});
  set_corner_solution(c);
  c.singular_point = Vec3{0.0, 0.0, 0.5};
  c.graded_dirs = {true, true, false};
  c.recommended = {{1, 0.6}, {2, 0.3}};
  return c;
}

BenchmarkCase smooth2d_case() {
  BenchmarkCase c;
  c.name = "smooth2d";
  c.description = "sin(pi x) sin(pi y) on the unit square, two patches";
  std::vector<Patch> patches;
  for (int m = 0; m < 2; ++m) {
    std::vector<Vec3> cp;
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) cp.push_back({0.5 * (m + i), double(j), 0.0});
    patches.push_back(make_patch(2, 1, std::move(cp)));
  }
  c.geometry = make_multipatch(std::move(patches), {1.0, 1.0});
  c.lambda = 1e9;
  c.exact_u = [](const Vec3& x) { return std::sin(kPi * x[0]) * std::sin(kPi * x[1]); };
  c.exact_grad = [](const Vec3& x) {
    return Vec3{kPi * std::cos(kPi * x[0]) * std::sin(kPi * x[1]), kPi * std::sin(kPi * x[0]) * std::cos(kPi * x[1]),
                0.0};
  };
  c.source = [](const Vec3& x) { return 2.0 * kPi * kPi * std::sin(kPi * x[0]) * std::sin(kPi * x[1]); };
  c.graded_dirs = {false, false, false};
  return c;
}

std::vector<std::string> case_names() { return {"heart2d", "kellogg", "cube", "lshape3d", "heart3d", "smooth2d"}; }

BenchmarkCase make_case(const std::string& name) {
  if (name == "heart2d") return heart2d_case();
  if (name == "kellogg") return kellogg_case();
  if (name == "cube") return cube_case();
  if (name == "lshape3d") return lshape3d_case();
  if (name == "heart3d") return heart3d_case();
  if (name == "smooth2d") return smooth2d_case();
  std::string list;
  for (const auto& n : case_names()) list += (list.empty() ? "" : ", ") + n;
  throw DomainError("unknown case '" + name + "'; available cases: " + list);
}

MultiPatchFile case_to_file(const BenchmarkCase& c) {
  MultiPatchFile f;
  f.geometry = c.geometry;
  f.case_name = c.name;
  f.singular_point = c.singular_point;
  f.graded = c.graded_dirs;
  return f;
}

}  // namespace dgiga
