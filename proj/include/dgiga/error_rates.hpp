#pragma once

// dG-norm errors against exact solutions and convergence studies.

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dgiga/assembly.hpp"
#include "dgiga/problems.hpp"
#include "dgiga/solver.hpp"

namespace dgiga {

struct DgErrorParts {
  double volume = 0.0;  ///< sum_i alpha_i ||grad(u - u_h)||^2
  double jump = 0.0;    ///< sum_F sigma_F ||[u - u_h]||^2 with per-patch h_i
  double total() const;  ///< sqrt(volume + jump)
};

/// Broken dG-norm of u - u_h. Volume integrals use k+2 Gauss points per
/// direction (2(k+1) on elements touching the singular point); interface
/// jumps of u are taken as zero, boundary faces use u_D - u_h. The jump
/// weights use the per-patch mesh size h_i whatever penalty the system used.
DgErrorParts dg_error_parts(const AssemblyContext& ctx, std::span<const double> coeffs, const ScalarField& exact_u,
                            const VectorField& exact_grad, Exec exec = Exec::Parallel);
double dg_error(const AssemblyContext& ctx, std::span<const double> coeffs, const ScalarField& exact_u,
                const VectorField& exact_grad, Exec exec = Exec::Parallel);

struct DiscretizationOptions {
  int k = 1;
  double mu = 1.0;
  bool grading = true;
  std::optional<double> eta;  ///< default_penalty(k, d) when unset
  PenaltyScale penalty_scale = PenaltyScale::FaceLocal;
};

/// Discretization of a benchmark with n elements per direction and patch,
/// graded toward the singular point when requested.
MultiPatchProblem build_problem(const BenchmarkCase& c, int n, const DiscretizationOptions& opts);

struct LevelResult {
  int s = 0;
  int dofs = 0;
  double h = 0.0;  ///< largest physical element diameter
  double error = 0.0;
  std::optional<double> rate;
  int iterations = 0;
  double seconds = 0.0;
};

struct ConvergenceReport {
  std::string case_name;
  int k = 1;
  double mu = 1.0;
  double eta = 0.0;
  bool graded = false;
  std::vector<LevelResult> levels;
};

struct ConvergenceOptions {
  DiscretizationOptions disc;
  int max_level = 1;
  int n0 = 2;
  SolveOptions solver;
  Exec exec = Exec::Parallel;
  std::function<void(const LevelResult&)> progress;
};

/// Solves on n = n0 2^s for s = 0..max_level and records dG errors and
/// rates log2(e_{s-1}/e_s).
ConvergenceReport run_convergence(const BenchmarkCase& c, const ConvergenceOptions& opts);

/// CSV with columns case,k,mu,s,dofs,h,dg_error,rate (rate empty at s=0).
void write_csv(std::ostream& out, const std::vector<ConvergenceReport>& reports);
/// Whitespace-separated "h error" rows for log-log plotting.
void write_plot_data(std::ostream& out, const ConvergenceReport& report);

}  // namespace dgiga
