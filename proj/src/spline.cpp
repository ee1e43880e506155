#include "dgiga/spline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dgiga {

namespace {

// Cox-de Boor triangle for the functions of degree `p` that are nonzero on
// knot span `span` (knots[span] <= x < knots[span+1]). Fills p+1 values.
void basis_funs(const std::vector<double>& U, int span, int p, double x, double* N) {
  double left[16];
  double right[16];
  N[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - U[span + 1 - j];
    right[j] = U[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double tmp = N[r] / (right[r + 1] + left[j - r]);
      N[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    N[j] = saved;
  }
}

}  // namespace

KnotVector::KnotVector(int degree, std::vector<double> knots)
    : degree_(degree), knots_(std::move(knots)) {
  if (degree_ < 1 || degree_ > 10) {
    throw DomainError("knot vector degree must be in [1,10]");
  }
  const int k = degree_;
  const int m = static_cast<int>(knots_.size());
  if (m < 2 * (k + 1)) {
    throw DomainError("knot vector too short for its degree");
  }
  for (int i = 0; i <= k; ++i) {
    if (knots_[i] != 0.0 || knots_[m - 1 - i] != 1.0) {
      throw DomainError("knot vector must be open on [0,1]");
    }
  }
  for (int i = k + 1; i < m - k - 1; ++i) {
    if (!(knots_[i] > knots_[i - 1])) {
      throw DomainError("interior knots must be strictly increasing and simple");
    }
  }
  if (!(knots_[m - k - 1] > knots_[m - k - 2])) {
    throw DomainError("last interior knot must be below 1");
  }
  breaks_.assign(knots_.begin() + k, knots_.end() - k);
}

KnotVector KnotVector::uniform(int degree, int n_elems) {
  if (n_elems < 1) {
    throw DomainError("need at least one element");
  }
  std::vector<double> b(n_elems + 1);
  for (int j = 0; j <= n_elems; ++j) {
    b[j] = static_cast<double>(j) / static_cast<double>(n_elems);
  }
  return from_breakpoints(degree, b);
}

KnotVector KnotVector::from_breakpoints(int degree, std::span<const double> breaks) {
  if (breaks.size() < 2) {
    throw DomainError("need at least two breakpoints");
  }
  std::vector<double> U;
  U.reserve(breaks.size() + 2 * degree);
  for (int i = 0; i < degree; ++i) U.push_back(breaks.front());
  U.insert(U.end(), breaks.begin(), breaks.end());
  for (int i = 0; i < degree; ++i) U.push_back(breaks.back());
  return KnotVector(degree, std::move(U));
}

std::vector<double> KnotVector::element_sizes() const {
  std::vector<double> h(num_elements());
  for (int e = 0; e < num_elements(); ++e) h[e] = element_size(e);
  return h;
}

int KnotVector::find_element(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream os;
    os << "parameter " << x << " outside [0,1]";
    throw DomainError(os.str());
  }
  const int ne = num_elements();
  if (x >= breaks_[ne]) return ne - 1;
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  return static_cast<int>(it - breaks_.begin()) - 1;
}

int KnotVector::eval_on_element(int elem, double x, std::span<double> values) const {
  basis_funs(knots_, elem + degree_, degree_, x, values.data());
  return elem;
}

int KnotVector::eval_on_element(int elem, double x, std::span<double> values,
                                std::span<double> derivs) const {
  const int k = degree_;
  const int span = elem + k;
  double lower[16];
  basis_funs(knots_, span, k - 1, x, lower);
  basis_funs(knots_, span, k, x, values.data());
  // N'_{i,k} = k/(u_{i+k}-u_i) N_{i,k-1} - k/(u_{i+k+1}-u_{i+1}) N_{i+1,k-1}
  // with active functions i = span-k .. span; lower holds N_{span-k+1..span, k-1}.
  for (int a = 0; a <= k; ++a) {
    const int i = span - k + a;
    double d = 0.0;
    if (a > 0) {
      const double den = knots_[i + k] - knots_[i];
      if (den > 0.0) d += k * lower[a - 1] / den;
    }
    if (a < k) {
      const double den = knots_[i + k + 1] - knots_[i + 1];
      if (den > 0.0) d -= k * lower[a] / den;
    }
    derivs[a] = d;
  }
  return elem;
}

ActiveBasis1d eval_basis_1d(const KnotVector& kv, double x) {
  ActiveBasis1d out;
  out.values.resize(kv.degree() + 1);
  out.first = kv.eval_on_element(kv.find_element(x), x, out.values);
  return out;
}

ActiveBasis1d eval_basis_deriv_1d(const KnotVector& kv, double x, int order) {
  if (order != 1) {
    throw DomainError("only first derivatives are supported");
  }
  ActiveBasis1d out;
  std::vector<double> vals(kv.degree() + 1);
  out.values.resize(kv.degree() + 1);
  out.first = kv.eval_on_element(kv.find_element(x), x, vals, out.values);
  return out;
}

double max_adjacent_ratio(const KnotVector& kv) {
  double worst = 1.0;
  for (int e = 0; e + 1 < kv.num_elements(); ++e) {
    const double r = kv.element_size(e) / kv.element_size(e + 1);
    worst = std::max({worst, r, 1.0 / r});
  }
  return worst;
}

bool check_quasi_uniform(const KnotVector& kv, double sigma) {
  if (sigma < 1.0) {
    throw DomainError("quasi-uniformity ratio must be >= 1");
  }
  for (int e = 0; e + 1 < kv.num_elements(); ++e) {
    const double r = kv.element_size(e) / kv.element_size(e + 1);
    if (r > sigma || r < 1.0 / sigma) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

TensorSpace::TensorSpace(std::vector<KnotVector> dirs) : dirs_(std::move(dirs)) {
  if (dirs_.size() < 1 || dirs_.size() > 3) {
    throw DomainError("tensor space dimension must be 1, 2 or 3");
  }
  for (const auto& kv : dirs_) {
    if (kv.degree() != dirs_[0].degree()) {
      throw DomainError("all directions must share the same degree");
    }
  }
}

int TensorSpace::size() const {
  int n = 1;
  for (const auto& kv : dirs_) n *= kv.num_basis();
  return n;
}

int TensorSpace::num_elements() const {
  int n = 1;
  for (const auto& kv : dirs_) n *= kv.num_elements();
  return n;
}

int TensorSpace::active_per_element() const {
  int n = 1;
  for (int d = 0; d < dim(); ++d) n *= degree() + 1;
  return n;
}

int TensorSpace::flat_index(const std::array<int, 3>& m) const {
  int idx = 0;
  for (int d = dim() - 1; d >= 0; --d) idx = idx * dirs_[d].num_basis() + m[d];
  return idx;
}

std::array<int, 3> TensorSpace::multi_index(int flat) const {
  std::array<int, 3> m{0, 0, 0};
  for (int d = 0; d < dim(); ++d) {
    m[d] = flat % dirs_[d].num_basis();
    flat /= dirs_[d].num_basis();
  }
  return m;
}

int TensorSpace::flat_element(const std::array<int, 3>& e) const {
  int idx = 0;
  for (int d = dim() - 1; d >= 0; --d) idx = idx * dirs_[d].num_elements() + e[d];
  return idx;
}

std::array<int, 3> TensorSpace::element_multi(int flat) const {
  std::array<int, 3> m{0, 0, 0};
  for (int d = 0; d < dim(); ++d) {
    m[d] = flat % dirs_[d].num_elements();
    flat /= dirs_[d].num_elements();
  }
  return m;
}

std::array<std::array<double, 2>, 3> TensorSpace::element_box(const std::array<int, 3>& e) const {
  std::array<std::array<double, 2>, 3> box{};
  for (int d = 0; d < dim(); ++d) {
    box[d] = {dirs_[d].breakpoints()[e[d]], dirs_[d].breakpoints()[e[d] + 1]};
  }
  return box;
}

double TensorSpace::max_element_diameter() const {
  double s = 0.0;
  for (const auto& kv : dirs_) {
    double hmax = 0.0;
    for (int e = 0; e < kv.num_elements(); ++e) hmax = std::max(hmax, kv.element_size(e));
    s += hmax * hmax;
  }
  return std::sqrt(s);
}

ActiveSet tensor_eval_on_element(const TensorSpace& space, const std::array<int, 3>& elem,
                                 const Vec3& xhat, bool with_gradient) {
  const int d = space.dim();
  const int k = space.degree();
  const int p1 = k + 1;
  double val[3][16];
  double der[3][16];
  for (int dir = 0; dir < d; ++dir) {
    if (with_gradient) {
      space.knots(dir).eval_on_element(elem[dir], xhat[dir], std::span(val[dir], p1),
                                       std::span(der[dir], p1));
    } else {
      space.knots(dir).eval_on_element(elem[dir], xhat[dir], std::span(val[dir], p1));
    }
  }
  ActiveSet out;
  const int nact = space.active_per_element();
  out.indices.resize(nact);
  out.values.resize(nact);
  if (with_gradient) out.gradients.resize(nact);
  std::array<int, 3> loc{0, 0, 0};
  for (int a = 0; a < nact; ++a) {
    int rem = a;
    for (int dir = 0; dir < d; ++dir) {
      loc[dir] = rem % p1;
      rem /= p1;
    }
    std::array<int, 3> glob{0, 0, 0};
    double v = 1.0;
    for (int dir = 0; dir < d; ++dir) {
      glob[dir] = elem[dir] + loc[dir];
      v *= val[dir][loc[dir]];
    }
    out.indices[a] = space.flat_index(glob);
    out.values[a] = v;
    if (with_gradient) {
      Vec3 g{0.0, 0.0, 0.0};
      for (int gd = 0; gd < d; ++gd) {
        double prod = 1.0;
        for (int dir = 0; dir < d; ++dir) {
          prod *= (dir == gd) ? der[dir][loc[dir]] : val[dir][loc[dir]];
        }
        g[gd] = prod;
      }
      out.gradients[a] = g;
    }
  }
  return out;
}

ActiveSet tensor_eval(const TensorSpace& space, const Vec3& xhat, bool with_gradient) {
  std::array<int, 3> elem{0, 0, 0};
  for (int dir = 0; dir < space.dim(); ++dir) elem[dir] = space.knots(dir).find_element(xhat[dir]);
  return tensor_eval_on_element(space, elem, xhat, with_gradient);
}

}  // namespace dgiga
