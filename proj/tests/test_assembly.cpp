#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstring>

#include "dgiga/assembly.hpp"
#include "dgiga/error_rates.hpp"
#include "dgiga/quadrature.hpp"
#include "fixtures.hpp"

using namespace dgiga;

namespace {

double energy(const CsrMatrix& A, const std::vector<double>& u) {
  std::vector<double> Au(u.size());
  spmv(A, u, Au, Exec::Serial);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * Au[i];
  return s;
}

double max_abs(const CsrMatrix& A) {
  double m = 0.0;
  for (double v : A.vals) m = std::max(m, std::abs(v));
  return m;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

double min_eigenvalue(const CsrMatrix& A) {
  const std::vector<double> D = A.to_dense();
  Eigen::MatrixXd M(A.rows, A.rows);
  for (int r = 0; r < A.rows; ++r)
    for (int c = 0; c < A.rows; ++c) M(r, c) = D[static_cast<std::size_t>(r) * A.rows + c];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

MultiPatchProblem case_problem(const std::string& name, int k, int n, double mu,
                               PenaltyScale scale = PenaltyScale::FaceLocal) {
  DiscretizationOptions o;
  o.k = k;
  o.mu = mu;
  o.penalty_scale = scale;
  return build_problem(make_case(name), n, o);
}

}  // namespace

TEST_SUITE("assembly") {
  TEST_CASE("default penalty") {
    CHECK(default_penalty(1, 2) == 24.0);
    CHECK(default_penalty(2, 2) == 48.0);
    CHECK(default_penalty(3, 3) == 96.0);
  }

  TEST_CASE("bilinear element stiffness on the unit square") {
    MultiPatchProblem pb = fx::problem(fx::multipatch({fx::rect(0, 0, 1, 1)}, {1.0}), 1, {1}, fx::constant(0),
                                       fx::constant(0));
    const AssemblyContext ctx(pb);
    const DgSystem v = assemble_volume(ctx, Exec::Serial);
    REQUIRE(v.matrix.rows == 4);
    // local order: (0,0) (1,0) (0,1) (1,1)
    for (int i = 0; i < 4; ++i) CHECK(v.matrix.at(i, i) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(v.matrix.at(0, 3) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
    CHECK(v.matrix.at(1, 2) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
    CHECK(v.matrix.at(0, 1) == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
    CHECK(v.matrix.at(0, 2) == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
  }

  TEST_CASE("constants are in the kernel of the volume matrix and f = 1 integrates to the area") {
    for (int k = 1; k <= 3; ++k) {
      const BenchmarkCase bc = heart2d_case();
      DiscretizationOptions o;
      o.k = k;
      o.mu = 0.5;
      MultiPatchProblem pb = build_problem(bc, 4, o);
      pb.source = fx::constant(1.0);
      const AssemblyContext ctx(pb);
      const DgSystem v = assemble_volume(ctx);
      const std::vector<double> one(v.rhs.size(), 1.0);
      std::vector<double> Ku(one.size());
      spmv(v.matrix, one, Ku, Exec::Serial);
      for (double x : Ku) CHECK(std::abs(x) <= 1e-12 * max_abs(v.matrix));

      MultiPatchProblem sq = fx::problem(fx::multipatch({fx::rect(0, 0, 1, 1)}, {1.0}), k, {3}, fx::constant(1),
                                         fx::constant(0));
      const AssemblyContext c2(sq);
      const DgSystem s = assemble_volume(c2);
      double sum = 0.0;
      for (double x : s.rhs) sum += x;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
  }

  TEST_CASE("continuous functions carry no interface energy") {
    for (int k = 1; k <= 3; ++k) {
      MultiPatchProblem pb = fx::problem(fx::two_squares(1.0, 1.0), k, {3, 3}, fx::constant(0), fx::constant(0));
      const AssemblyContext ctx(pb);
      const DgSystem I = assemble_interface(ctx);
      auto g = fx::rng(20 + k);
      std::vector<double> u(ctx.dofs().size());
      for (double& x : u) x = fx::uniform01(g);
      // copy the face row of patch 0 (x = 1) onto patch 1 (x = 0)
      const TensorSpace& sp = pb.spaces[0];
      const int nx = sp.num_basis(0);
      for (int j = 0; j < sp.num_basis(1); ++j) {
        u[ctx.dofs().global(1, sp.flat_index({0, j, 0}))] = u[ctx.dofs().global(0, sp.flat_index({nx - 1, j, 0}))];
      }
      CHECK(std::abs(energy(I.matrix, u)) <= 1e-12 * max_abs(I.matrix));
      for (double x : I.rhs) CHECK(x == 0.0);

      // volume energy of the glued function equals the single-domain energy
      MultiPatchProblem one = fx::problem(fx::multipatch({fx::rect(0, 0, 2, 1)}, {1.0}), k, {1}, fx::constant(0),
                                          fx::constant(0));
      one.spaces[0] = TensorSpace({KnotVector::uniform(k, 6), KnotVector::uniform(k, 3)});
      if (k == 1) {
        const AssemblyContext c1(one);
        const DgSystem V1 = assemble_volume(c1);
        const DgSystem V2 = assemble_volume(ctx);
        std::vector<double> w(c1.dofs().size());
        const TensorSpace& big = one.spaces[0];
        for (int j = 0; j < big.num_basis(1); ++j) {
          for (int i = 0; i < big.num_basis(0); ++i) {
            const int p = i < nx ? 0 : 1;
            const int li = i < nx ? i : i - nx + 1;
            w[big.flat_index({i, j, 0})] = u[ctx.dofs().global(p, sp.flat_index({li, j, 0}))];
          }
        }
        CHECK(energy(V1.matrix, w) == doctest::Approx(energy(V2.matrix, u)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("swapping patch roles permutes the matrix") {
    MultiPatchProblem a = fx::problem(fx::two_squares(1.0, 3.0), 2, {2, 3}, fx::constant(1), fx::constant(0.5));
    MultiPatchProblem b = fx::problem(fx::multipatch({fx::rect(1, 0, 1, 1), fx::rect(0, 0, 1, 1)}, {3.0, 1.0}), 2,
                                      {3, 2}, fx::constant(1), fx::constant(0.5));
    const AssemblyContext ca(a);
    const AssemblyContext cb(b);
    const DgSystem sa = assemble(ca);
    const DgSystem sb = assemble(cb);
    const int n0 = a.spaces[0].size();
    const int n1 = a.spaces[1].size();
    auto perm = [&](int i) { return i < n0 ? i + n1 : i - n0; };
    const double scale = max_abs(sa.matrix);
    for (int r = 0; r < sa.matrix.rows; ++r) {
      CHECK(std::abs(sa.rhs[r] - sb.rhs[perm(r)]) <= 1e-13 * scale);
      for (std::size_t p = sa.matrix.row_ptr[r]; p < sa.matrix.row_ptr[r + 1]; ++p) {
        CHECK(std::abs(sa.matrix.vals[p] - sb.matrix.at(perm(r), perm(sa.matrix.cols[p]))) <= 1e-13 * scale);
      }
    }
  }

  TEST_CASE("penalty energy of a unit jump") {
    const double eta = 24.0;
    for (PenaltyScale scale : {PenaltyScale::FaceLocal, PenaltyScale::PatchMax}) {
      MultiPatchProblem pb = fx::problem(fx::two_squares(), 1, {1, 1}, fx::constant(0), fx::constant(0), eta);
      pb.penalty_scale = scale;
      const AssemblyContext ctx(pb);
      const DgSystem I = assemble_interface(ctx);
      std::vector<double> u(ctx.dofs().size(), 0.0);
      for (int i = 0; i < pb.spaces[0].size(); ++i) u[ctx.dofs().global(0, i)] = 1.0;
      const double h = scale == PenaltyScale::FaceLocal ? 1.0 : std::sqrt(2.0);
      CHECK(energy(I.matrix, u) == doctest::Approx(2.0 * eta / h).epsilon(1e-13));
    }
  }

  TEST_CASE("literal double visit of every interface equals the single visit") {
    // Each patch visits its interface faces with 1/2 s_i and 1/2 p_i, normals
    // pointing out of the visiting patch and jumps taken from its side.
    for (PenaltyScale scale : {PenaltyScale::PatchMax, PenaltyScale::FaceLocal}) {
      const int k = 2;
      const int n = 2;
      const double alpha[2] = {1.0, 3.0};
      MultiPatchProblem pb = fx::problem(fx::two_squares(alpha[0], alpha[1]), k, {n, n}, fx::constant(0),
                                         fx::constant(0));
      pb.penalty_scale = scale;
      const AssemblyContext ctx(pb);
      const DgSystem I = assemble_interface(ctx);
      const double h = scale == PenaltyScale::PatchMax ? std::sqrt(2.0) / n : 1.0 / n;
      const double sigma = pb.penalty_eta * (alpha[0] / h + alpha[1] / h);

      const int N = ctx.dofs().size();
      std::vector<double> M(static_cast<std::size_t>(N) * N, 0.0);
      const GaussRule1d gr = gauss_legendre(k + 1);
      for (int visitor = 0; visitor < 2; ++visitor) {
        const double nx = visitor == 0 ? 1.0 : -1.0;
        for (int e = 0; e < n; ++e) {
          for (std::size_t q = 0; q < gr.points.size(); ++q) {
            const double y = (e + gr.points[q]) / n;
            const double w = gr.weights[q] / n;
            // side values: patch 0 at xhat = (1, y), patch 1 at xhat = (0, y)
            std::vector<double> jump(N, 0.0);
            std::vector<double> flux(N, 0.0);
            for (int p = 0; p < 2; ++p) {
              const Vec3 xh{p == 0 ? 1.0 : 0.0, y, 0.0};
              const std::array<int, 3> el{p == 0 ? n - 1 : 0, e, 0};
              const ActiveSet a = tensor_eval_on_element(pb.spaces[p], el, xh, true);
              const double sgn = p == visitor ? 1.0 : -1.0;
              for (std::size_t j = 0; j < a.indices.size(); ++j) {
                const int g = ctx.dofs().global(p, a.indices[j]);
                jump[g] += sgn * a.values[j];
                flux[g] += 0.5 * alpha[p] * a.gradients[j][0] * nx;
              }
            }
            for (int i = 0; i < N; ++i) {
              for (int j = 0; j < N; ++j) {
                M[static_cast<std::size_t>(i) * N + j] +=
                    0.5 * w * (-(flux[j] * jump[i] + flux[i] * jump[j]) + sigma * jump[i] * jump[j]);
              }
            }
          }
        }
      }
      double dev = 0.0;
      double big = 0.0;
      for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
          big = std::max(big, std::abs(M[static_cast<std::size_t>(i) * N + j]));
          dev = std::max(dev, std::abs(M[static_cast<std::size_t>(i) * N + j] - I.matrix.at(i, j)));
        }
      }
      CHECK(big > 1.0);
      CHECK(dev <= 1e-12 * big);
    }
  }

  TEST_CASE("boundary terms: zero data, linearity in eta") {
    MultiPatchProblem pb = fx::problem(fx::two_squares(), 2, {2, 3}, fx::constant(0), fx::constant(0));
    {
      const AssemblyContext ctx(pb);
      const DgSystem B = assemble_boundary(ctx);
      for (double x : B.rhs) CHECK(x == 0.0);
    }
    auto boundary_at = [&](double eta) {
      MultiPatchProblem q = pb;
      q.penalty_eta = eta;
      const AssemblyContext ctx(q);
      return assemble_boundary(ctx).matrix;
    };
    const CsrMatrix B1 = boundary_at(10.0);
    const CsrMatrix B2 = boundary_at(20.0);
    const CsrMatrix B3 = boundary_at(30.0);
    const CsrMatrix B4 = boundary_at(40.0);
    const double scale = max_abs(B4);
    double dev = 0.0;
    for (std::size_t p = 0; p < B1.vals.size(); ++p) {
      const double p1 = B2.vals[p] - B1.vals[p];
      dev = std::max(dev, std::abs((B3.vals[p] - B2.vals[p]) - p1));
      // doubling eta doubles the penalty block
      dev = std::max(dev, std::abs((B4.vals[p] - B2.vals[p]) - 2.0 * p1));
    }
    CHECK(dev <= 1e-13 * scale);
  }

  TEST_CASE("user penalty is used verbatim") {
    MultiPatchProblem pb = fx::problem(fx::two_squares(), 1, {1, 1}, fx::constant(0), fx::constant(0), 100.0);
    const AssemblyContext ctx(pb);
    CHECK(pb.penalty_eta == 100.0);
    for (double s : ctx.interfaces()[0].sigma) CHECK(s == doctest::Approx(200.0));
    for (const auto& b : ctx.boundaries())
      for (double s : b.sigma) CHECK(s == doctest::Approx(100.0));
  }

  TEST_CASE("patch test: polynomials of degree <= k are reproduced") {
    struct Poly {
      int deg;
      ScalarField u;
      VectorField g;
    };
    const std::vector<Poly> polys = {
        {1, [](const Vec3& x) { return x[0] + x[1]; }, [](const Vec3&) { return Vec3{1, 1, 0}; }},
        {1, [](const Vec3& x) { return 2 - 3 * x[0] + 0.5 * x[1] + x[2]; },
         [](const Vec3&) { return Vec3{-3, 0.5, 1}; }},
        {2, [](const Vec3& x) { return x[0] * x[0] - x[1] * x[1] + x[0] * x[1]; },
         [](const Vec3& x) { return Vec3{2 * x[0] + x[1], -2 * x[1] + x[0], 0}; }},
    };
    struct Geo {
      std::string label;
      MultiPatch g;
      std::vector<int> n;
    };
    const std::vector<Geo> geos = {
        {"unit square", fx::multipatch({fx::rect(0, 0, 1, 1)}, {1.0}), {1}},
        {"matching pair", fx::two_squares(), {3, 3}},
        {"non-matching pair", fx::two_squares(), {2, 3}},
        {"four quadrants", fx::multipatch({fx::rect(0, 0, 1, 1), fx::rect(-1, 0, 1, 1), fx::rect(-1, -1, 1, 1),
                                           fx::rect(0, -1, 1, 1)},
                                          {1, 1, 1, 1}),
         {2, 3, 2, 4}},
        {"two cubes", fx::multipatch({fx::box(0, 0, 0, 1), fx::box(1, 0, 0, 1)}, {1, 1}), {2, 3}},
    };
    for (const auto& geo : geos) {
      for (int k = 1; k <= 2; ++k) {
        for (const auto& poly : polys) {
          if (poly.deg > k) continue;
          if (geo.g.dim() == 3 && k == 2) continue;
          // -Laplace of the quadratic above vanishes, so f = 0 throughout
          MultiPatchProblem pb = fx::problem(geo.g, k, geo.n, fx::constant(0), poly.u);
          const AssemblyContext ctx(pb);
          const DgSystem sys = assemble(ctx);
          const std::vector<double> x = fx::solve_dense(sys);
          CAPTURE(geo.label);
          CAPTURE(k);
          CHECK(dg_error(ctx, x, poly.u, poly.g) <= 1e-9);
        }
      }
    }
  }

  TEST_CASE("single-patch linear solution through the boundary treatment") {
    MultiPatchProblem pb = fx::problem(fx::multipatch({fx::rect(0, 0, 1, 1)}, {1.0}), 1, {1}, fx::constant(0),
                                       [](const Vec3& x) { return x[0] + x[1]; });
    const AssemblyContext ctx(pb);
    const std::vector<double> x = fx::solve_dense(assemble(ctx));
    const std::vector<double> expect{0.0, 1.0, 1.0, 2.0};
    for (int i = 0; i < 4; ++i) CHECK(std::abs(x[i] - expect[i]) <= 1e-10);
  }

  TEST_CASE("symmetry of assembled systems") {
    const std::vector<MultiPatchProblem> pbs = {
        case_problem("heart2d", 2, 8, 0.3), case_problem("kellogg", 2, 8, 0.2), case_problem("cube", 2, 2, 0.6),
        case_problem("lshape3d", 1, 4, 0.6), case_problem("heart3d", 2, 2, 0.6),
        case_problem("heart2d", 1, 8, 0.6, PenaltyScale::PatchMax)};
    for (const auto& pb : pbs) {
      const AssemblyContext ctx(pb);
      const DgSystem s = assemble(ctx);
      CHECK(symmetry_defect(s.matrix) <= 1e-12);
    }
  }

  TEST_CASE("coercivity probe with the default penalty") {
    const std::vector<MultiPatchProblem> pbs = {
        case_problem("heart2d", 1, 4, 0.6), case_problem("heart2d", 2, 8, 0.3), case_problem("heart2d", 2, 4, 1.0),
        case_problem("kellogg", 1, 8, 0.4), case_problem("kellogg", 2, 4, 0.2), case_problem("cube", 1, 2, 1.0),
        case_problem("lshape3d", 1, 4, 0.6), case_problem("heart3d", 1, 2, 0.6),
        fx::problem(fx::two_squares(1.0, 100.0), 3, {2, 3}, fx::constant(0), fx::constant(0))};
    for (const auto& pb : pbs) {
      const AssemblyContext ctx(pb);
      REQUIRE(ctx.dofs().size() <= 400);
      const DgSystem s = assemble(ctx);
      CHECK(min_eigenvalue(s.matrix) > 0.0);
    }
  }

  TEST_CASE("a tiny penalty makes the system indefinite") {
    MultiPatchProblem pb = fx::problem(fx::two_squares(), 1, {2, 2}, fx::constant(1), fx::constant(0), 0.1);
    const AssemblyContext ctx(pb);
    CHECK(min_eigenvalue(assemble(ctx).matrix) < 0.0);
  }

  TEST_CASE("assembly is bitwise deterministic") {
    const std::vector<MultiPatchProblem> pbs = {case_problem("heart2d", 2, 8, 0.3), case_problem("cube", 2, 2, 0.6)};
    for (const auto& pb : pbs) {
      const AssemblyContext ctx(pb);
      const DgSystem a = assemble(ctx, Exec::Parallel);
      const DgSystem b = assemble(ctx, Exec::Parallel);
      const DgSystem c = assemble(ctx, Exec::Serial);
      CHECK(a.matrix.cols == c.matrix.cols);
      CHECK(a.matrix.row_ptr == c.matrix.row_ptr);
      CHECK(bitwise_equal(a.matrix.vals, b.matrix.vals));
      CHECK(bitwise_equal(a.rhs, b.rhs));
      CHECK(bitwise_equal(a.matrix.vals, c.matrix.vals));
      CHECK(bitwise_equal(a.rhs, c.rhs));
      const AssemblyContext ctx2(pb);
      CHECK(bitwise_equal(assemble(ctx2).matrix.vals, a.matrix.vals));
    }
  }

  TEST_CASE("parts add up to the full system") {
    const MultiPatchProblem pb = case_problem("kellogg", 1, 4, 0.4);
    const AssemblyContext ctx(pb);
    const DgSystem full = assemble(ctx);
    const DgSystem v = assemble_volume(ctx);
    const DgSystem i = assemble_interface(ctx);
    const DgSystem b = assemble_boundary(ctx);
    for (std::size_t p = 0; p < full.matrix.vals.size(); ++p) {
      CHECK(full.matrix.vals[p] == doctest::Approx(v.matrix.vals[p] + i.matrix.vals[p] + b.matrix.vals[p]));
    }
  }

  TEST_CASE("invalid problems are rejected") {
    MultiPatchProblem pb = fx::problem(fx::two_squares(), 1, {2, 2}, fx::constant(0), fx::constant(0));
    MultiPatchProblem bad = pb;
    bad.spaces.pop_back();
    CHECK_THROWS_AS(AssemblyContext{bad}, AssemblyError);
    bad = pb;
    bad.penalty_eta = 0.0;
    CHECK_THROWS_AS(AssemblyContext{bad}, AssemblyError);
    bad = pb;
    bad.spaces[1] = fx::uniform_space(2, 2, 2);
    CHECK_THROWS_AS(AssemblyContext{bad}, AssemblyError);
    bad = pb;
    bad.source = nullptr;
    CHECK_THROWS_AS(AssemblyContext{bad}, AssemblyError);
  }
}
