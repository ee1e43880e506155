#pragma once

// Open knot vectors, 1D B-spline evaluation (Cox-de Boor) and tensor-product
// spaces on the parametric cube [0,1]^d.

#include <array>
#include <span>
#include <vector>

#include "dgiga/error.hpp"

namespace dgiga {

using Vec3 = std::array<double, 3>;

/// Clamped knot vector of degree k on [0,1] with simple interior knots.
class KnotVector {
 public:
  KnotVector(int degree, std::vector<double> knots);

  /// n equal elements.
  static KnotVector uniform(int degree, int n_elems);
  /// Open knot vector whose distinct values are `breaks` (first 0, last 1).
  static KnotVector from_breakpoints(int degree, std::span<const double> breaks);

  int degree() const { return degree_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& breakpoints() const { return breaks_; }
  int num_basis() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  int num_elements() const { return static_cast<int>(breaks_.size()) - 1; }
  double element_size(int e) const { return breaks_[e + 1] - breaks_[e]; }
  std::vector<double> element_sizes() const;

  /// Element containing x. Right-continuous, except x == 1 maps to the last
  /// element.
  int find_element(double x) const;

  /// Values of the k+1 functions active on element `elem`, evaluated at x
  /// with that element's polynomial pieces (x may lie outside the element,
  /// which gives one-sided limits at breakpoints). Returns the first active
  /// global index, which is always `elem`.
  int eval_on_element(int elem, double x, std::span<double> values) const;
  int eval_on_element(int elem, double x, std::span<double> values,
                      std::span<double> derivs) const;

 private:
  int degree_;
  std::vector<double> knots_;
  std::vector<double> breaks_;
};

/// Active functions at a parameter: first index plus k+1 values.
struct ActiveBasis1d {
  int first = 0;
  std::vector<double> values;
};

ActiveBasis1d eval_basis_1d(const KnotVector& kv, double x);
ActiveBasis1d eval_basis_deriv_1d(const KnotVector& kv, double x, int order = 1);

/// True iff all adjacent element-size ratios lie in [1/sigma, sigma].
bool check_quasi_uniform(const KnotVector& kv, double sigma);
/// Largest adjacent element-size ratio (>= 1); 1 for a single element.
double max_adjacent_ratio(const KnotVector& kv);

/// Tensor-product B-spline space of equal degree in each of d directions.
/// Flat indices run fastest in direction 0.
class TensorSpace {
 public:
  explicit TensorSpace(std::vector<KnotVector> dirs);

  int dim() const { return static_cast<int>(dirs_.size()); }
  int degree() const { return dirs_[0].degree(); }
  const KnotVector& knots(int dir) const { return dirs_[dir]; }
  const std::vector<KnotVector>& directions() const { return dirs_; }

  int size() const;
  int num_basis(int dir) const { return dirs_[dir].num_basis(); }
  int num_elements() const;
  int num_elements(int dir) const { return dirs_[dir].num_elements(); }
  int active_per_element() const;

  int flat_index(const std::array<int, 3>& multi) const;
  std::array<int, 3> multi_index(int flat) const;
  int flat_element(const std::array<int, 3>& e) const;
  std::array<int, 3> element_multi(int flat) const;

  /// Parametric box of an element.
  std::array<std::array<double, 2>, 3> element_box(const std::array<int, 3>& e) const;
  /// Largest parametric element diameter.
  double max_element_diameter() const;

 private:
  std::vector<KnotVector> dirs_;
};

struct ActiveSet {
  std::vector<int> indices;
  std::vector<double> values;
  std::vector<Vec3> gradients;  ///< parametric gradients; empty unless requested
};

ActiveSet tensor_eval(const TensorSpace& space, const Vec3& xhat, bool with_gradient);

/// Same as tensor_eval but on a prescribed element (one-sided traces).
ActiveSet tensor_eval_on_element(const TensorSpace& space, const std::array<int, 3>& elem,
                                 const Vec3& xhat, bool with_gradient);

}  // namespace dgiga
