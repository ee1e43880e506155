#pragma once

#include <span>
#include <vector>

#include "dgiga/multipatch.hpp"

namespace dgiga {

/// Gauss-Legendre nodes and weights on [0,1].
struct GaussRule1d {
  std::vector<double> points;
  std::vector<double> weights;
};

GaussRule1d gauss_legendre(int npts);

/// Tensor rule on the unit cube [0,1]^d.
struct QuadRule {
  int dim = 0;
  int order = 0;  ///< exact for polynomials of this degree per direction
  std::vector<Vec3> points;
  std::vector<double> weights;
};

QuadRule tensor_rule(int npts, int dim);
/// k+1 points per direction.
QuadRule element_rule(int k, int dim);

/// Sorted union of two breakpoint sets; values closer than tol are merged.
std::vector<double> merge_breakpoints(std::span<const double> a, std::span<const double> b,
                                      double tol = 1e-13);

struct FaceQuadPoint {
  Vec3 xhat_a{};
  Vec3 xhat_b{};   ///< unused on boundary faces
  Vec3 x{};
  Vec3 normal{};   ///< outward from side a
  double weight;   ///< Gauss weight times surface measure
};

/// Sub-cell of a face on which both sides' traces are polynomial.
struct FaceCell {
  std::array<int, 3> elem_a{};
  std::array<int, 3> elem_b{};
  std::vector<FaceQuadPoint> points;
};

struct FaceRule {
  bool is_interface = false;
  int patch_a = 0;
  int face_a = 0;
  int patch_b = -1;
  int face_b = -1;
  std::vector<FaceCell> cells;
};

/// Quadrature on an interface, on the merged partition of both sides'
/// knot-line traces. Points are inverted into side b with Newton; throws
/// InversionError naming the face if that fails.
FaceRule interface_rule(const Patch& patch_a, const TensorSpace& space_a, const Patch& patch_b,
                        const TensorSpace& space_b, const InterfaceSpec& spec, int npts);

/// Quadrature on a boundary face, one cell per face element.
FaceRule boundary_rule(const Patch& patch, const TensorSpace& space, int patch_id, int face,
                       int npts);

}  // namespace dgiga
