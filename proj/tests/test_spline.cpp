#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "dgiga/grading.hpp"
#include "dgiga/spline.hpp"
#include "fixtures.hpp"

using namespace dgiga;

namespace {

// Cox-de Boor recursion on the full knot sequence, right-continuous except at
// the right end of the domain.
double naive_basis(const std::vector<double>& t, int i, int p, double x) {
  if (p == 0) {
    const double last = t.back();
    if (x == last) {
      return (t[i] < t[i + 1] && t[i + 1] == last) ? 1.0 : 0.0;
    }
    return (t[i] <= x && x < t[i + 1]) ? 1.0 : 0.0;
  }
  double v = 0.0;
  if (t[i + p] > t[i]) v += (x - t[i]) / (t[i + p] - t[i]) * naive_basis(t, i, p - 1, x);
  if (t[i + p + 1] > t[i + 1]) v += (t[i + p + 1] - x) / (t[i + p + 1] - t[i + 1]) * naive_basis(t, i + 1, p - 1, x);
  return v;
}

KnotVector random_kv(std::mt19937& g, int degree, int n_interior) {
  std::set<double> inner;
  while (static_cast<int>(inner.size()) < n_interior) inner.insert(0.02 + 0.96 * fx::uniform01(g));
  std::vector<double> breaks{0.0};
  breaks.insert(breaks.end(), inner.begin(), inner.end());
  breaks.push_back(1.0);
  return KnotVector::from_breakpoints(degree, breaks);
}

}  // namespace

TEST_SUITE("spline") {
  TEST_CASE("linear hat values at 0.25") {
    const KnotVector kv(1, {0, 0, 1, 1});
    const ActiveBasis1d b = eval_basis_1d(kv, 0.25);
    CHECK(b.first == 0);
    REQUIRE(b.values.size() == 2);
    CHECK(b.values[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(b.values[1] == doctest::Approx(0.25).epsilon(1e-15));
  }

  TEST_CASE("open knot vector invariants") {
    const KnotVector kv = KnotVector::uniform(3, 5);
    for (int i = 0; i <= 3; ++i) {
      CHECK(kv.knots()[i] == 0.0);
      CHECK(kv.knots()[kv.knots().size() - 1 - i] == 1.0);
    }
    CHECK(kv.num_basis() == 8);
    CHECK(kv.num_elements() == 5);
    for (double h : kv.element_sizes()) CHECK(h > 0.0);
    CHECK_THROWS_AS(KnotVector(1, {0, 0.1, 1, 1}), DomainError);
    CHECK_THROWS_AS(KnotVector(2, {0, 0, 0, 0.5, 0.5, 1, 1, 1}), DomainError);
    CHECK_THROWS_AS(KnotVector(1, {0, 0, 0.7, 0.3, 1, 1}), DomainError);
  }

  TEST_CASE("partition of unity and nonnegativity on random knot vectors") {
    auto g = fx::rng(1);
    for (int trial = 0; trial < 40; ++trial) {
      const int k = 1 + trial % 5;
      const KnotVector kv = random_kv(g, k, 1 + trial % 9);
      for (int s = 0; s < 50; ++s) {
        const double x = s == 0 ? 0.0 : (s == 1 ? 1.0 : fx::uniform01(g));
        const ActiveBasis1d b = eval_basis_1d(kv, x);
        REQUIRE(static_cast<int>(b.values.size()) == k + 1);
        double sum = 0.0;
        for (double v : b.values) {
          CHECK(v >= 0.0);
          sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-14);
      }
    }
  }

  TEST_CASE("values agree with the naive Cox-de Boor recursion") {
    auto g = fx::rng(2);
    for (int trial = 0; trial < 20; ++trial) {
      const int k = 1 + trial % 4;
      const KnotVector kv = random_kv(g, k, 2 + trial % 6);
      for (int s = 0; s < 30; ++s) {
        const double x = s == 0 ? 1.0 : fx::uniform01(g);
        const ActiveBasis1d b = eval_basis_1d(kv, x);
        for (int j = 0; j < kv.num_basis(); ++j) {
          const int local = j - b.first;
          const double mine = (local >= 0 && local <= k) ? b.values[local] : 0.0;
          CHECK(std::abs(mine - naive_basis(kv.knots(), j, k, x)) <= 1e-13);
        }
      }
    }
  }

  TEST_CASE("quadratic values at an interior breakpoint match both adjacent spans") {
    const KnotVector kv(2, {0, 0, 0, 0.5, 1, 1, 1});
    std::array<double, 3> left{};
    std::array<double, 3> right{};
    const int fl = kv.eval_on_element(0, 0.5, left);
    const int fr = kv.eval_on_element(1, 0.5, right);
    std::vector<double> full_l(kv.num_basis(), 0.0);
    std::vector<double> full_r(kv.num_basis(), 0.0);
    for (int i = 0; i < 3; ++i) {
      full_l[fl + i] = left[i];
      full_r[fr + i] = right[i];
    }
    for (int j = 0; j < kv.num_basis(); ++j) {
      CHECK(std::abs(full_l[j] - full_r[j]) <= 1e-15);
      CHECK(std::abs(full_l[j] - naive_basis(kv.knots(), j, 2, 0.5)) <= 1e-15);
    }
    const ActiveBasis1d b = eval_basis_1d(kv, 0.5);
    CHECK(b.first == 1);
    CHECK(kv.find_element(0.5) == 1);
    CHECK(kv.find_element(1.0) == 1);
  }

  TEST_CASE("linear hat derivatives") {
    const KnotVector kv(1, {0, 0, 1, 1});
    for (double x : {0.0, 0.3, 0.5, 1.0}) {
      const ActiveBasis1d d = eval_basis_deriv_1d(kv, x);
      CHECK(d.values[0] == doctest::Approx(-1.0));
      CHECK(d.values[1] == doctest::Approx(1.0));
    }
  }

  TEST_CASE("derivatives sum to zero") {
    auto g = fx::rng(3);
    for (int trial = 0; trial < 30; ++trial) {
      const KnotVector kv = random_kv(g, 1 + trial % 5, 1 + trial % 7);
      for (int s = 0; s < 20; ++s) {
        const ActiveBasis1d d = eval_basis_deriv_1d(kv, fx::uniform01(g));
        double sum = 0.0;
        for (double v : d.values) sum += v;
        CHECK(std::abs(sum) <= 1e-12);
      }
    }
  }

  TEST_CASE("derivatives match central differences") {
    auto g = fx::rng(4);
    const double step = 1e-6;
    for (int trial = 0; trial < 20; ++trial) {
      const int k = trial < 10 ? 2 : 1 + trial % 4;
      const KnotVector kv = random_kv(g, k, 3);
      const double x = trial < 10 ? 0.37 : 0.05 + 0.9 * fx::uniform01(g);
      const auto& br = kv.breakpoints();
      if (std::any_of(br.begin(), br.end(), [&](double b) { return std::abs(b - x) < 1e-4; })) continue;
      const ActiveBasis1d d = eval_basis_deriv_1d(kv, x);
      const ActiveBasis1d p = eval_basis_1d(kv, x + step);
      const ActiveBasis1d m = eval_basis_1d(kv, x - step);
      REQUIRE(p.first == d.first);
      REQUIRE(m.first == d.first);
      for (int i = 0; i <= k; ++i) {
        const double fd = (p.values[i] - m.values[i]) / (2 * step);
        CHECK(std::abs(fd - d.values[i]) <= 1e-5);
        if (std::abs(d.values[i]) > 1e-2) CHECK(std::abs(fd - d.values[i]) / std::abs(d.values[i]) <= 1e-5);
      }
    }
  }

  TEST_CASE("evaluation outside [0,1] is a domain error") {
    const KnotVector kv = KnotVector::uniform(2, 3);
    CHECK_THROWS_AS(eval_basis_1d(kv, -0.01), DomainError);
    CHECK_THROWS_AS(eval_basis_1d(kv, 1.01), DomainError);
    CHECK_THROWS_AS(eval_basis_deriv_1d(kv, 1.5), DomainError);
    CHECK_THROWS_AS(tensor_eval(fx::uniform_space(2, 1, 2), {0.5, 1.2, 0.0}, false), DomainError);
  }

  TEST_CASE("quasi-uniformity checks") {
    CHECK(check_quasi_uniform(KnotVector::uniform(1, 8), 1.0));
    std::vector<double> geo{0.0};
    double h = 1.0;
    for (int i = 0; i < 5; ++i) {
      geo.push_back(geo.back() + h);
      h *= 2.0;
    }
    for (double& b : geo) b /= geo.back();
    const KnotVector gkv = KnotVector::from_breakpoints(1, geo);
    CHECK_FALSE(check_quasi_uniform(gkv, 1.5));
    CHECK(check_quasi_uniform(gkv, 2.0 + 1e-12));

    const KnotVector graded = KnotVector::from_breakpoints(2, grade_knots_1d(16, 0.5, 0.0));
    const auto hs = graded.element_sizes();
    double scan = 1.0;
    for (std::size_t i = 0; i + 1 < hs.size(); ++i) scan = std::max({scan, hs[i] / hs[i + 1], hs[i + 1] / hs[i]});
    CHECK(max_adjacent_ratio(graded) == doctest::Approx(scan).epsilon(1e-14));
    CHECK(check_quasi_uniform(graded, scan));
    CHECK_FALSE(check_quasi_uniform(graded, scan * (1 - 1e-9)));
    CHECK_THROWS_AS(check_quasi_uniform(graded, 0.5), DomainError);
  }

  TEST_CASE("tensor evaluation of bilinear space at the center") {
    const TensorSpace sp = fx::uniform_space(2, 1, 1);
    const ActiveSet a = tensor_eval(sp, {0.5, 0.5, 0.0}, false);
    REQUIRE(a.values.size() == 4);
    for (double v : a.values) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));
  }

  TEST_CASE("tensor index bijection and dimension") {
    for (int d : {2, 3}) {
      std::vector<KnotVector> dirs{KnotVector::uniform(2, 3), KnotVector::uniform(2, 5)};
      if (d == 3) dirs.push_back(KnotVector::uniform(2, 2));
      const TensorSpace sp(dirs);
      int expect = 1;
      for (int i = 0; i < d; ++i) expect *= sp.num_basis(i);
      CHECK(sp.size() == expect);
      std::set<int> seen;
      for (int f = 0; f < sp.size(); ++f) {
        const auto m = sp.multi_index(f);
        CHECK(sp.flat_index(m) == f);
        seen.insert(f);
      }
      CHECK(static_cast<int>(seen.size()) == sp.size());
      for (int e = 0; e < sp.num_elements(); ++e) CHECK(sp.flat_element(sp.element_multi(e)) == e);
    }
  }

  TEST_CASE("tensor partition of unity, support size and gradients") {
    auto g = fx::rng(5);
    for (int d : {2, 3}) {
      for (int k = 1; k <= 3; ++k) {
        std::vector<KnotVector> dirs;
        for (int i = 0; i < d; ++i) dirs.push_back(random_kv(g, k, 2 + i));
        const TensorSpace sp(dirs);
        for (int s = 0; s < 20; ++s) {
          Vec3 x{0.0, 0.0, 0.0};
          for (int i = 0; i < d; ++i) x[i] = 0.02 + 0.96 * fx::uniform01(g);
          const ActiveSet a = tensor_eval(sp, x, true);
          CHECK(static_cast<int>(a.values.size()) == sp.active_per_element());
          double sum = 0.0;
          for (double v : a.values) sum += v;
          CHECK(std::abs(sum - 1.0) <= 1e-13);
          const double step = 1e-6;
          std::array<int, 3> elem{0, 0, 0};
          for (int i = 0; i < d; ++i) elem[i] = sp.knots(i).find_element(x[i]);
          for (int dir = 0; dir < d; ++dir) {
            Vec3 xp = x;
            Vec3 xm = x;
            xp[dir] += step;
            xm[dir] -= step;
            const ActiveSet ap = tensor_eval_on_element(sp, elem, xp, false);
            const ActiveSet am = tensor_eval_on_element(sp, elem, xm, false);
            for (std::size_t j = 0; j < a.values.size(); ++j) {
              const double fd = (ap.values[j] - am.values[j]) / (2 * step);
              CHECK(std::abs(fd - a.gradients[j][dir]) <= 1e-5 * std::max(1.0, std::abs(fd)));
            }
          }
        }
      }
    }
  }
}
