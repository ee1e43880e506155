#include "dgiga/error_rates.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace dgiga {

double DgErrorParts::total() const { return std::sqrt(volume + jump); }

namespace {

double element_error(const AssemblyContext& ctx, int p, const std::array<int, 3>& elem,
                     std::span<const double> coeffs, const VectorField& exact_grad) {
  const MultiPatchProblem& pb = ctx.problem();
  const int d = pb.dim();
  const int npts = ctx.volume_points(p, elem, pb.degree() + 2);
  const QuadRule q = tensor_rule(npts, d);
  const auto box = pb.spaces[p].element_box(elem);
  double measure = 1.0;
  for (int i = 0; i < d; ++i) measure *= box[i][1] - box[i][0];
  double sum = 0.0;
  for (std::size_t i = 0; i < q.points.size(); ++i) {
    Vec3 xh{0.0, 0.0, 0.0};
    for (int j = 0; j < d; ++j) xh[j] = box[j][0] + q.points[i][j] * (box[j][1] - box[j][0]);
    const PointBasis b = eval_physical(pb, ctx.dofs(), p, elem, xh);
    const FieldValue f = eval_field(b, coeffs, d);
    const Vec3 g = exact_grad(b.x);
    double e2 = 0.0;
    for (int j = 0; j < d; ++j) e2 += (g[j] - f.grad[j]) * (g[j] - f.grad[j]);
    sum += q.weights[i] * measure * std::abs(b.det) * e2;
  }
  return pb.geometry.alpha(p) * sum;
}

double face_error(const AssemblyContext& ctx, const FaceData& fd, std::span<const double> coeffs,
                  const ScalarField& exact_u) {
  const MultiPatchProblem& pb = ctx.problem();
  const int d = pb.dim();
  double sum = 0.0;
  for (std::size_t c = 0; c < fd.rule.cells.size(); ++c) {
    const FaceCell& cell = fd.rule.cells[c];
    double cell_sum = 0.0;
    for (const FaceQuadPoint& qp : cell.points) {
      const PointBasis ba = eval_physical(pb, ctx.dofs(), fd.rule.patch_a, cell.elem_a, qp.xhat_a);
      double jump = 0.0;
      if (fd.rule.is_interface) {
        const PointBasis bb = eval_physical(pb, ctx.dofs(), fd.rule.patch_b, cell.elem_b, qp.xhat_b);
        jump = eval_field(ba, coeffs, d).value - eval_field(bb, coeffs, d).value;
      } else {
        jump = exact_u(qp.x) - eval_field(ba, coeffs, d).value;
      }
      cell_sum += qp.weight * jump * jump;
    }
    sum += fd.norm_sigma[c] * cell_sum;
  }
  return sum;
}

}  // namespace

DgErrorParts dg_error_parts(const AssemblyContext& ctx, std::span<const double> coeffs, const ScalarField& exact_u,
                            const VectorField& exact_grad, Exec exec) {
  const MultiPatchProblem& pb = ctx.problem();
  DgErrorParts parts;
  for (int p = 0; p < pb.geometry.num_patches(); ++p) {
    const TensorSpace& sp = pb.spaces[p];
    const int ne = sp.num_elements();
    std::vector<double> per(ne, 0.0);
    if (exec == Exec::Serial) {
      for (int e = 0; e < ne; ++e) per[e] = element_error(ctx, p, sp.element_multi(e), coeffs, exact_grad);
    } else {
#pragma omp parallel for schedule(dynamic, 16)
      for (int e = 0; e < ne; ++e) per[e] = element_error(ctx, p, sp.element_multi(e), coeffs, exact_grad);
    }
    for (double v : per) parts.volume += v;
  }
  for (const auto& fd : ctx.interfaces()) parts.jump += face_error(ctx, fd, coeffs, exact_u);
  for (const auto& fd : ctx.boundaries()) parts.jump += face_error(ctx, fd, coeffs, exact_u);
  return parts;
}

double dg_error(const AssemblyContext& ctx, std::span<const double> coeffs, const ScalarField& exact_u,
                const VectorField& exact_grad, Exec exec) {
  return dg_error_parts(ctx, coeffs, exact_u, exact_grad, exec).total();
}

MultiPatchProblem build_problem(const BenchmarkCase& c, int n, const DiscretizationOptions& opts) {
  if (n < 1) throw DomainError("need at least one element per direction");
  if (!(opts.mu > 0.0 && opts.mu <= 1.0)) throw DomainError("grading parameter must lie in (0,1]");
  const int d = c.geometry.dim();
  MultiPatchProblem pb;
  pb.geometry = c.geometry;
  pb.source = c.source;
  pb.dirichlet = c.dirichlet();
  pb.penalty_eta = opts.eta.value_or(default_penalty(opts.k, d));
  pb.penalty_scale = opts.penalty_scale;
  for (int p = 0; p < c.geometry.num_patches(); ++p) {
    std::optional<SingularParam> sp;
    if (c.singular_point) sp = singular_preimage(c.geometry.patch(p), *c.singular_point, c.graded_dirs);
    const double mu = opts.grading ? opts.mu : 1.0;
    pb.spaces.push_back(graded_space(d, opts.k, n, mu, sp.value_or(SingularParam{})));
    pb.singular.push_back(sp);
  }
  return pb;
}

ConvergenceReport run_convergence(const BenchmarkCase& c, const ConvergenceOptions& opts) {
  if (opts.max_level < 1) throw DomainError("convergence study needs at least two levels");
  ConvergenceReport rep;
  rep.case_name = c.name;
  rep.k = opts.disc.k;
  rep.graded = opts.disc.grading && opts.disc.mu < 1.0;
  rep.mu = opts.disc.grading ? opts.disc.mu : 1.0;
  rep.eta = opts.disc.eta.value_or(default_penalty(opts.disc.k, c.geometry.dim()));
  for (int s = 0; s <= opts.max_level; ++s) {
    const auto t0 = std::chrono::steady_clock::now();
    const MultiPatchProblem pb = build_problem(c, opts.n0 << s, opts.disc);
    const AssemblyContext ctx(pb);
    const DgSystem sys = assemble(ctx, opts.exec);
    std::vector<double> x(sys.rhs.size(), 0.0);
    const SolveReport sr = solve(sys.matrix, sys.rhs, x, opts.solver);
    LevelResult lr;
    lr.s = s;
    lr.dofs = ctx.dofs().size();
    for (double h : ctx.patch_h()) lr.h = std::max(lr.h, h);
    lr.error = dg_error(ctx, x, c.exact_u, c.exact_grad, opts.exec);
    lr.iterations = sr.iterations;
    if (s > 0) lr.rate = std::log2(rep.levels.back().error / lr.error);
    lr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.levels.push_back(lr);
    if (opts.progress) opts.progress(lr);
  }
  return rep;
}

void write_csv(std::ostream& out, const std::vector<ConvergenceReport>& reports) {
  out << "case,k,mu,s,dofs,h,dg_error,rate\n";
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(17);
  for (const auto& r : reports) {
    for (const auto& l : r.levels) {
      out << r.case_name << ',' << r.k << ',' << r.mu << ',' << l.s << ',' << l.dofs << ',' << l.h << ','
          << l.error << ',';
      if (l.rate) out << *l.rate;
      out << '\n';
    }
  }
  out.flags(flags);
  out.precision(prec);
}

void write_plot_data(std::ostream& out, const ConvergenceReport& report) {
  const auto prec = out.precision();
  out << std::setprecision(17);
  out << "# " << report.case_name << " k=" << report.k << " mu=" << report.mu << "\n# h dg_error\n";
  for (const auto& l : report.levels) out << l.h << ' ' << l.error << '\n';
  out.precision(prec);
}

}  // namespace dgiga
