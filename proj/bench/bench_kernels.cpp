// Serial reference vs OpenMP kernels: volume assembly, full assembly, SpMV.
// Usage: bench_kernels [case] [k] [level] [repeats]

#include <omp.h>

#include <chrono>
#include <cstring>
#include <iomanip>
#include <iostream>
#include <string>

#include "dgiga/error_rates.hpp"
#include "dgiga/problems.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double best_of(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
  }
  return best;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

void row(const std::string& name, double serial, double parallel, bool equal) {
  std::cout << std::left << std::setw(18) << name << std::right << std::fixed << std::setprecision(4)
            << std::setw(10) << serial << std::setw(12) << parallel << std::setw(9) << std::setprecision(2)
            << serial / parallel << "x" << std::setw(10) << (equal ? "yes" : "NO") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  const std::string name = argc > 1 ? argv[1] : "cube";
  const int k = argc > 2 ? std::stoi(argv[2]) : 2;
  const int level = argc > 3 ? std::stoi(argv[3]) : 2;
  const int repeats = argc > 4 ? std::stoi(argv[4]) : 3;

  const dgiga::BenchmarkCase bc = dgiga::make_case(name);
  dgiga::DiscretizationOptions opts;
  opts.k = k;
  opts.mu = 0.6;
  const dgiga::MultiPatchProblem pb = dgiga::build_problem(bc, 2 << level, opts);
  const dgiga::AssemblyContext ctx(pb);

  std::cout << "case " << name << "  k=" << k << "  level=" << level << "  dofs=" << ctx.dofs().size()
            << "  threads=" << omp_get_max_threads() << '\n';
  std::cout << std::left << std::setw(18) << "kernel" << std::right << std::setw(10) << "serial" << std::setw(12)
            << "parallel" << std::setw(10) << "speedup" << std::setw(10) << "bitwise" << '\n';

  dgiga::DgSystem vs;
  dgiga::DgSystem vp;
  const double tvs = best_of(repeats, [&] { vs = dgiga::assemble_volume(ctx, dgiga::Exec::Serial); });
  const double tvp = best_of(repeats, [&] { vp = dgiga::assemble_volume(ctx, dgiga::Exec::Parallel); });
  row("volume assembly", tvs, tvp, same_bits(vs.matrix.vals, vp.matrix.vals) && same_bits(vs.rhs, vp.rhs));

  dgiga::DgSystem fs;
  dgiga::DgSystem fp;
  const double tfs = best_of(repeats, [&] { fs = dgiga::assemble(ctx, dgiga::Exec::Serial); });
  const double tfp = best_of(repeats, [&] { fp = dgiga::assemble(ctx, dgiga::Exec::Parallel); });
  row("full assembly", tfs, tfp, same_bits(fs.matrix.vals, fp.matrix.vals) && same_bits(fs.rhs, fp.rhs));

  std::vector<double> x(fs.rhs.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1.0 / (1.0 + static_cast<double>(i % 17));
  std::vector<double> ys(x.size());
  std::vector<double> yp(x.size());
  const int spmv_reps = 50;
  const double tss = best_of(repeats, [&] {
    for (int i = 0; i < spmv_reps; ++i) dgiga::spmv(fs.matrix, x, ys, dgiga::Exec::Serial);
  });
  const double tsp = best_of(repeats, [&] {
    for (int i = 0; i < spmv_reps; ++i) dgiga::spmv(fs.matrix, x, yp, dgiga::Exec::Parallel);
  });
  row("spmv x50", tss, tsp, same_bits(ys, yp));
  return 0;
}
