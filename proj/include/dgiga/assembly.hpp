#pragma once

// Symmetric interior-penalty dG assembly over the broken multipatch B-spline
// space. For test functions phi and trial functions u:
//
//   a_h(u, phi) = sum_i int_{Omega_i} alpha grad u . grad phi
//               - sum_F int_F {alpha grad u}.n [phi] + {alpha grad phi}.n [u]
//               + sum_F int_F sigma_F [u][phi]
//   l(phi)      = int f phi - sum_{F in boundary} int_F alpha grad phi.n u_D
//               + sum_{F in boundary} int_F sigma_F u_D phi
//
// with [v] = v_a - v_b, {v} = (v_a + v_b)/2 and n pointing from side a to side
// b on interfaces, [v] = v, {v} = v on the boundary, and
// sigma_F = eta (alpha_a/h_a + alpha_b/h_b) (interface) or eta alpha/h
// (boundary). Each interface is integrated once from its lower-id side.

#include <functional>
#include <optional>
#include <vector>

#include "dgiga/grading.hpp"
#include "dgiga/multipatch.hpp"
#include "dgiga/quadrature.hpp"
#include "dgiga/sparse.hpp"

namespace dgiga {

using ScalarField = std::function<double(const Vec3&)>;

/// How h enters the penalty weight sigma_F.
enum class PenaltyScale {
  /// Largest element diameter of the patch (one h_i per patch).
  PatchMax,
  /// Per face element: smallest normal extent of the adjacent element on each
  /// side, min over its Gauss points of h_dir / |J^{-T} e_dir|.
  FaceLocal,
};

/// eta = 4 (k+1) (k+d).
double default_penalty(int k, int d);

struct MultiPatchProblem {
  MultiPatch geometry;
  std::vector<TensorSpace> spaces;  ///< discretization space per patch
  ScalarField source;
  ScalarField dirichlet;
  double penalty_eta = 0.0;
  PenaltyScale penalty_scale = PenaltyScale::FaceLocal;
  /// Per patch: pre-image of the singular point, used to raise the quadrature
  /// order on elements that touch it.
  std::vector<std::optional<SingularParam>> singular;

  int dim() const { return geometry.dim(); }
  int degree() const { return spaces.front().degree(); }
};

struct DofMap {
  std::vector<int> offset;  ///< size patches+1
  int size() const { return offset.back(); }
  int global(int patch, int local) const { return offset[patch] + local; }
};

struct DgSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
  DofMap dofs;
};

/// Face quadrature and penalty weights shared by assembly and error
/// evaluation.
struct FaceData {
  FaceRule rule;
  std::vector<double> sigma;       ///< penalty weight per cell used in the system
  std::vector<double> norm_sigma;  ///< per-patch h_i weight used by the dG norm
};

class AssemblyContext {
 public:
  explicit AssemblyContext(const MultiPatchProblem& problem);

  const MultiPatchProblem& problem() const { return *problem_; }
  const DofMap& dofs() const { return dofs_; }
  const std::vector<FaceData>& interfaces() const { return interfaces_; }
  const std::vector<FaceData>& boundaries() const { return boundaries_; }
  const std::vector<double>& patch_h() const { return patch_h_; }
  /// Zero matrix with the full sparsity pattern.
  CsrMatrix empty_matrix() const { return make_csr(pattern_); }
  /// Gauss points per direction on an element (raised near the singularity).
  int volume_points(int patch, const std::array<int, 3>& elem, int base) const;

 private:
  const MultiPatchProblem* problem_;
  DofMap dofs_;
  std::vector<double> patch_h_;
  std::vector<FaceData> interfaces_;
  std::vector<FaceData> boundaries_;
  std::vector<std::vector<int>> pattern_;
};

/// Validates the problem (alpha > 0, spaces match patches, faces covered once).
void validate_problem(const MultiPatchProblem& problem);

DgSystem assemble_volume(const AssemblyContext& ctx, Exec exec = Exec::Parallel);
DgSystem assemble_interface(const AssemblyContext& ctx);
DgSystem assemble_boundary(const AssemblyContext& ctx);
/// Full system: volume + interface + boundary.
DgSystem assemble(const AssemblyContext& ctx, Exec exec = Exec::Parallel);

/// Shape data of one side of a face or of a volume point.
struct PointBasis {
  std::vector<int> dofs;          ///< global dof indices
  std::vector<double> values;
  std::vector<Vec3> grads;        ///< physical gradients
  Vec3 x{};
  double det = 0.0;
};

/// Basis values and physical gradients of patch `p` at xhat, restricted to
/// element `elem`.
PointBasis eval_physical(const MultiPatchProblem& problem, const DofMap& dofs, int p,
                         const std::array<int, 3>& elem, const Vec3& xhat);

/// u_h and grad u_h at a point from the global coefficient vector.
struct FieldValue {
  double value = 0.0;
  Vec3 grad{};
};
FieldValue eval_field(const PointBasis& basis, std::span<const double> coeffs, int dim);

}  // namespace dgiga
