#pragma once

// Multipatch topology (interfaces, boundary faces) and the plain-text
// multipatch file format.
//
// File grammar (whitespace separated, '#' starts a comment):
//
//   dgiga-multipatch 1
//   dim <d>
//   patch <id>                 # ids 0..N-1 in order
//     degree <k>
//     knots <t_0> ... <t_m>     # d lines, one per parametric direction
//     alpha <value>
//     control <count>           # followed by <count> rows of d coordinates,
//     <x> <y> [<z>]             # direction 0 running fastest
//   end
//   interface <pa> <fa> <pb> <fb> <swap> <flip0> <flip1>
//   case <name>                 # optional: benchmark providing exact data
//   singular <x> <y> [<z>]      # optional: singular point for grading
//   graded <g0> <g1> [<g2>]     # optional: 1 = grade that direction
//   source <value>              # optional constant f (default 0)
//   dirichlet <value>           # optional constant u_D (default 0)
//
// Faces are numbered 2*dir + side. Faces not listed in an interface are
// Dirichlet boundary faces.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dgiga/geometry.hpp"

namespace dgiga {

/// Maps face coordinates of side a to face coordinates of side b:
/// w = swap ? (u1, u0) : u, then v_m = flip_m ? 1 - w_m : w_m.
struct FaceOrientation {
  bool swap = false;
  std::array<bool, 2> flip{false, false};

  std::array<double, 2> apply(const std::array<double, 2>& u) const;
  /// Which face-a tangential slot feeds face-b slot m.
  int source_slot(int m) const { return swap ? 1 - m : m; }
  bool operator==(const FaceOrientation&) const = default;
};

struct InterfaceSpec {
  int patch_a = 0;
  int face_a = 0;
  int patch_b = 0;
  int face_b = 0;
  FaceOrientation orient;
  bool operator==(const InterfaceSpec&) const = default;
};

struct BoundaryFace {
  int patch = 0;
  int face = 0;
};

class MultiPatch {
 public:
  MultiPatch() = default;
  MultiPatch(std::vector<Patch> patches, std::vector<double> alpha,
             std::vector<InterfaceSpec> interfaces);

  int dim() const { return patches_.empty() ? 0 : patches_[0].dim(); }
  int num_patches() const { return static_cast<int>(patches_.size()); }
  const Patch& patch(int i) const { return patches_[i]; }
  const std::vector<Patch>& patches() const { return patches_; }
  double alpha(int i) const { return alpha_[i]; }
  const std::vector<double>& alphas() const { return alpha_; }
  const std::vector<InterfaceSpec>& interfaces() const { return interfaces_; }
  /// Faces not claimed by any interface.
  std::vector<BoundaryFace> boundary_faces() const;

 private:
  std::vector<Patch> patches_;
  std::vector<double> alpha_;
  std::vector<InterfaceSpec> interfaces_;
};

/// Pairs faces whose images coincide (checked on a 3^{d-1} grid of face
/// points), lower patch id first.
std::vector<InterfaceSpec> detect_interfaces(const std::vector<Patch>& patches,
                                             double tol = 1e-9);

struct MultiPatchFile {
  MultiPatch geometry;
  std::string case_name;
  std::optional<Vec3> singular_point;
  std::array<bool, 3> graded{true, true, true};
  double source = 0.0;
  double dirichlet = 0.0;
};

MultiPatchFile read_multipatch(std::istream& in);
MultiPatchFile read_multipatch_file(const std::string& path);
void write_multipatch(std::ostream& out, const MultiPatchFile& file);

}  // namespace dgiga
