#pragma once

#include <random>
#include <vector>

#include "dgiga/assembly.hpp"
#include "dgiga/error_rates.hpp"
#include "dgiga/problems.hpp"

namespace fx {

using dgiga::Vec3;

inline dgiga::Patch linear_patch(const std::vector<Vec3>& corners) {
  const int d = corners.size() == 8 ? 3 : 2;
  std::vector<dgiga::KnotVector> dirs(d, dgiga::KnotVector::uniform(1, 1));
  return dgiga::Patch(dgiga::TensorSpace(dirs), corners);
}

/// [x0, x0+sx] x [y0, y0+sy] as a bilinear patch.
inline dgiga::Patch rect(double x0, double y0, double sx, double sy) {
  return linear_patch({{x0, y0, 0}, {x0 + sx, y0, 0}, {x0, y0 + sy, 0}, {x0 + sx, y0 + sy, 0}});
}

inline dgiga::Patch box(double x0, double y0, double z0, double s) {
  std::vector<Vec3> c;
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) c.push_back({x0 + i * s, y0 + j * s, z0 + k * s});
  return linear_patch(c);
}

inline dgiga::MultiPatch multipatch(std::vector<dgiga::Patch> patches, std::vector<double> alpha) {
  auto itf = dgiga::detect_interfaces(patches);
  return dgiga::MultiPatch(std::move(patches), std::move(alpha), std::move(itf));
}

inline dgiga::TensorSpace uniform_space(int d, int k, int n) {
  return dgiga::TensorSpace(std::vector<dgiga::KnotVector>(d, dgiga::KnotVector::uniform(k, n)));
}

/// Problem with uniform n_p elements per direction on patch p.
inline dgiga::MultiPatchProblem problem(dgiga::MultiPatch g, int k, std::vector<int> n, dgiga::ScalarField f,
                                        dgiga::ScalarField uD, double eta = 0.0) {
  dgiga::MultiPatchProblem pb;
  const int d = g.dim();
  for (int p = 0; p < g.num_patches(); ++p) pb.spaces.push_back(uniform_space(d, k, n[p]));
  pb.geometry = std::move(g);
  pb.source = std::move(f);
  pb.dirichlet = std::move(uD);
  pb.penalty_eta = eta > 0.0 ? eta : dgiga::default_penalty(k, d);
  return pb;
}

inline dgiga::ScalarField constant(double c) {
  return [c](const Vec3&) { return c; };
}

/// Two unit squares side by side, [0,1]x[0,1] and [1,2]x[0,1].
inline dgiga::MultiPatch two_squares(double a0 = 1.0, double a1 = 1.0) {
  return multipatch({rect(0, 0, 1, 1), rect(1, 0, 1, 1)}, {a0, a1});
}

inline std::vector<double> solve_dense(const dgiga::DgSystem& sys) {
  std::vector<double> x(sys.rhs.size(), 0.0);
  dgiga::solve_dense(sys.matrix, sys.rhs, x);
  return x;
}

inline std::mt19937 rng(unsigned seed = 12345u) { return std::mt19937(seed); }

inline double uniform01(std::mt19937& g) { return std::uniform_real_distribution<double>(0.0, 1.0)(g); }

}  // namespace fx
