#include "dgiga/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "dgiga/error_rates.hpp"
#include "dgiga/grading.hpp"
#include "dgiga/problems.hpp"
#include "dgiga/solver.hpp"

namespace dgiga {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(int line) { return line > 0 ? "line " + std::to_string(line) + ": " : ""; }

int to_int(const std::string& v, const std::string& key, int line) {
  int x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw ParseError(where(line) + key + " expects an integer, got '" + v + "'");
  }
  return x;
}

double to_double(const std::string& v, const std::string& key, int line) {
  double x = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw ParseError(where(line) + key + " expects a number, got '" + v + "'");
  }
  return x;
}

bool to_bool(const std::string& v, const std::string& key, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError(where(line) + key + " expects true or false, got '" + v + "'");
}

// number or a keyword, normalized to the shortest round-trip form
std::string number_or(const std::string& v, const std::string& keyword, const std::string& key, int line) {
  if (v == keyword) return v;
  return fmt(to_double(v, key, line));
}

const std::vector<std::string> kKeys = {"case", "geometry", "k", "mu", "eta", "levels", "level",
                                        "out", "tol", "grading", "both", "solver", "penalty", "samples"};

void set_key(RunConfig& c, const std::string& key, const std::string& v, int line) {
  if (key == "case") c.case_name = v;
  else if (key == "geometry") c.geometry = v;
  else if (key == "k") c.k = to_int(v, key, line);
  else if (key == "mu") c.mu = number_or(v, "auto", key, line);
  else if (key == "eta") c.eta = number_or(v, "default", key, line);
  else if (key == "levels") c.levels = to_int(v, key, line);
  else if (key == "level") c.level = to_int(v, key, line);
  else if (key == "out") c.out = v;
  else if (key == "tol") c.tol = to_double(v, key, line);
  else if (key == "grading") c.grading = to_bool(v, key, line);
  else if (key == "both") c.both = to_bool(v, key, line);
  else if (key == "solver") c.solver = v;
  else if (key == "penalty") c.penalty = v;
  else if (key == "samples") c.samples = to_int(v, key, line);
  else {
    std::string known;
    for (const auto& k : kKeys) known += (known.empty() ? "" : ", ") + k;
    throw ParseError(where(line) + "unknown key '" + key + "' (known keys: " + known + ")");
  }
}

std::string case_list() {
  std::string s;
  for (const auto& n : case_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

PenaltyScale parse_penalty(const std::string& s) {
  if (s == "local") return PenaltyScale::FaceLocal;
  if (s == "patch") return PenaltyScale::PatchMax;
  throw ParseError("unknown penalty scale '" + s + "' (expected local or patch)");
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::set<std::string> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(where(line) + "expected 'key = value', got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (!seen.insert(key).second) throw ParseError(where(line) + "duplicate key '" + key + "'");
    set_key(c, key, value, line);
  }
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open config file '" + path + "'");
  try {
    return parse_config(f);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "case = " << c.case_name << '\n'
     << "geometry = " << c.geometry << '\n'
     << "k = " << c.k << '\n'
     << "mu = " << c.mu << '\n'
     << "eta = " << c.eta << '\n'
     << "levels = " << c.levels << '\n'
     << "level = " << c.level << '\n'
     << "out = " << c.out << '\n'
     << "tol = " << fmt(c.tol) << '\n'
     << "grading = " << (c.grading ? "true" : "false") << '\n'
     << "both = " << (c.both ? "true" : "false") << '\n'
     << "solver = " << c.solver << '\n'
     << "penalty = " << c.penalty << '\n'
     << "samples = " << c.samples << '\n';
  return os.str();
}

void validate_config(const RunConfig& c) {
  if (c.case_name.empty() == c.geometry.empty()) {
    throw ParseError("give exactly one of --case or --geometry (available cases: " + case_list() + ")");
  }
  if (!c.case_name.empty()) {
    const auto names = case_names();
    if (std::find(names.begin(), names.end(), c.case_name) == names.end()) {
      throw ParseError("unknown case '" + c.case_name + "'; available cases: " + case_list());
    }
  }
  if (c.k < 1 || c.k > 10) throw ParseError("k must lie in 1..10");
  if (c.mu != "auto") {
    const double mu = to_double(c.mu, "mu", 0);
    if (!(mu > 0.0 && mu <= 1.0)) throw ParseError("mu must lie in (0,1] or be 'auto'");
  }
  if (c.eta != "default" && !(to_double(c.eta, "eta", 0) > 0.0)) {
    throw ParseError("eta must be positive or 'default'");
  }
  if (c.levels < 1 || c.levels > 10) throw ParseError("levels must lie in 1..10");
  if (c.level < 0 || c.level > 10) throw ParseError("level must lie in 0..10");
  if (!(c.tol > 0.0 && c.tol < 1.0)) throw ParseError("tol must lie in (0,1)");
  if (c.samples < 2 || c.samples > 1000) throw ParseError("samples must lie in 2..1000");
  parse_solve_method(c.solver);
  parse_penalty(c.penalty);
}

namespace {

struct Setup {
  BenchmarkCase bc;
  bool has_exact = true;
  ConvergenceOptions conv;
  fs::path out_dir;
};

Setup resolve(const RunConfig& c, const std::optional<std::string>& out_flag) {
  validate_config(c);
  Setup s;
  if (!c.case_name.empty()) {
    s.bc = make_case(c.case_name);
  } else {
    MultiPatchFile f = read_multipatch_file(c.geometry);
    if (!f.case_name.empty()) {
      s.bc = make_case(f.case_name);
    } else {
      s.bc.name = fs::path(c.geometry).stem().string();
      s.bc.lambda = 1.0;
      const double src = f.source;
      const double dir = f.dirichlet;
      s.bc.source = [src](const Vec3&) { return src; };
      s.bc.exact_u = [dir](const Vec3&) { return dir; };
      s.has_exact = false;
    }
    s.bc.geometry = f.geometry;
    s.bc.singular_point = f.singular_point;
    s.bc.graded_dirs = f.graded;
  }
  DiscretizationOptions& d = s.conv.disc;
  d.k = c.k;
  d.grading = c.grading;
  d.mu = c.mu == "auto" ? choose_mu(s.bc.lambda, c.k, s.bc.delta) : to_double(c.mu, "mu", 0);
  if (c.eta != "default") d.eta = to_double(c.eta, "eta", 0);
  d.penalty_scale = parse_penalty(c.penalty);
  s.conv.max_level = c.levels;
  s.conv.solver.tol = c.tol;
  s.conv.solver.method = parse_solve_method(c.solver);

  if (out_flag) {
    s.out_dir = *out_flag;
  } else if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
    s.out_dir = env;
  } else {
    s.out_dir = c.out;
  }
  return s;
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error("cannot create output directory '" + p.string() + "': " + ec.message());
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw Error("cannot write '" + p.string() + "'");
  return f;
}

std::string tag(const Setup& s) {
  std::string t = s.bc.name + "_k" + std::to_string(s.conv.disc.k);
  if (s.conv.disc.grading && s.conv.disc.mu < 1.0) t += "_mu" + fmt(s.conv.disc.mu);
  return t;
}

void write_field(std::ostream& out, const MultiPatchProblem& pb, const DofMap& dofs, const std::vector<double>& x,
                 int samples) {
  const int d = pb.dim();
  out << std::setprecision(17);
  out << "# dgiga field dump: one block per patch, points on a uniform parametric grid\n";
  out << "# patch <id> <samples per direction> then rows of x y" << (d == 3 ? " z" : "") << " u_h\n";
  for (int p = 0; p < pb.geometry.num_patches(); ++p) {
    out << "patch " << p;
    for (int i = 0; i < d; ++i) out << ' ' << samples;
    out << '\n';
    int total = 1;
    for (int i = 0; i < d; ++i) total *= samples;
    for (int q = 0; q < total; ++q) {
      Vec3 xh{0.0, 0.0, 0.0};
      int rem = q;
      for (int i = 0; i < d; ++i) {
        xh[i] = static_cast<double>(rem % samples) / (samples - 1);
        rem /= samples;
      }
      const ActiveSet a = tensor_eval(pb.spaces[p], xh, false);
      double u = 0.0;
      for (std::size_t j = 0; j < a.indices.size(); ++j) u += x[dofs.global(p, a.indices[j])] * a.values[j];
      const Vec3 X = pb.geometry.patch(p).map_point(xh);
      for (int i = 0; i < d; ++i) out << X[i] << ' ';
      out << u << '\n';
    }
  }
}

int cmd_solve(const RunConfig& c, const std::optional<std::string>& out_flag, std::ostream& out) {
  Setup s = resolve(c, out_flag);
  const int n = s.conv.n0 << c.level;
  const MultiPatchProblem pb = build_problem(s.bc, n, s.conv.disc);
  const AssemblyContext ctx(pb);
  const DgSystem sys = assemble(ctx);
  std::vector<double> x(sys.rhs.size(), 0.0);
  const SolveReport rep = solve(sys.matrix, sys.rhs, x, s.conv.solver);

  out << "case " << s.bc.name << "  k=" << c.k << "  mu=" << fmt(s.conv.disc.grading ? s.conv.disc.mu : 1.0)
      << "  eta=" << fmt(pb.penalty_eta) << "  level=" << c.level << "  n=" << n << '\n';
  out << "dofs " << ctx.dofs().size() << "  nnz " << sys.matrix.nnz() << '\n';
  out << "solver " << to_string(rep.method) << "  iterations " << rep.iterations << "  relative residual "
      << rep.rel_residual << '\n';
  if (s.has_exact && s.bc.exact_grad) {
    out << "dg_error " << std::setprecision(10) << dg_error(ctx, x, s.bc.exact_u, s.bc.exact_grad) << '\n';
  }

  ensure_dir(s.out_dir);
  const std::string base = tag(s) + "_s" + std::to_string(c.level);
  {
    auto f = open_out(s.out_dir / (base + "_coeffs.txt"));
    f << std::setprecision(17);
    f << "# coefficients per patch, local index with direction 0 fastest\n";
    for (int p = 0; p < pb.geometry.num_patches(); ++p) {
      f << "patch " << p << ' ' << pb.spaces[p].size() << '\n';
      for (int i = 0; i < pb.spaces[p].size(); ++i) f << x[ctx.dofs().global(p, i)] << '\n';
    }
  }
  {
    auto f = open_out(s.out_dir / (base + "_field.txt"));
    write_field(f, pb, ctx.dofs(), x, c.samples);
  }
  out << "wrote " << (s.out_dir / (base + "_coeffs.txt")).string() << " and "
      << (s.out_dir / (base + "_field.txt")).string() << '\n';
  return kExitOk;
}

void print_table(std::ostream& out, const std::vector<ConvergenceReport>& reps) {
  out << "Convergence rates in the dG norm\n";
  out << std::setw(6) << "s";
  for (const auto& r : reps) {
    std::string head = "k=" + std::to_string(r.k) + (r.graded ? ", mu=" + fmt(r.mu) : ", uniform");
    out << " | " << std::setw(10) << "dofs" << ' ' << std::setw(12) << "dg_error" << ' ' << std::setw(18) << head;
  }
  out << '\n';
  const std::size_t rows = reps.front().levels.size();
  for (std::size_t i = 0; i < rows; ++i) {
    out << std::setw(6) << ("s=" + std::to_string(i));
    for (const auto& r : reps) {
      const LevelResult& l = r.levels[i];
      std::ostringstream e;
      e << std::scientific << std::setprecision(4) << l.error;
      std::ostringstream rt;
      if (l.rate) rt << std::fixed << std::setprecision(6) << *l.rate;
      else rt << "-";
      out << " | " << std::setw(10) << l.dofs << ' ' << std::setw(12) << e.str() << ' ' << std::setw(18) << rt.str();
    }
    out << '\n';
  }
}

int cmd_rates(const RunConfig& c, const std::optional<std::string>& out_flag, std::ostream& out) {
  Setup s = resolve(c, out_flag);
  if (!s.has_exact || !s.bc.exact_grad) {
    throw ParseError("rates needs a benchmark case with a known exact solution");
  }
  std::vector<ConvergenceOptions> runs;
  if (c.both) {
    ConvergenceOptions u = s.conv;
    u.disc.grading = false;
    runs.push_back(u);
    ConvergenceOptions g = s.conv;
    g.disc.grading = true;
    runs.push_back(g);
  } else {
    runs.push_back(s.conv);
  }
  std::vector<ConvergenceReport> reps;
  for (auto& r : runs) {
    r.progress = [&out](const LevelResult& l) {
      out << "  level " << l.s << ": dofs " << l.dofs << ", dg_error " << std::scientific << std::setprecision(4)
          << l.error << std::defaultfloat << ", " << std::fixed << std::setprecision(2) << l.seconds << std::defaultfloat
          << std::setprecision(6) << " s\n";
      out.flush();
    };
    reps.push_back(run_convergence(s.bc, r));
  }
  out << "case " << s.bc.name << "  eta=" << fmt(reps.front().eta) << '\n';
  print_table(out, reps);

  ensure_dir(s.out_dir);
  const fs::path csv = s.out_dir / (s.bc.name + "_k" + std::to_string(c.k) + "_rates.csv");
  {
    auto f = open_out(csv);
    write_csv(f, reps);
  }
  for (const auto& r : reps) {
    const std::string name = s.bc.name + "_k" + std::to_string(r.k) + (r.graded ? "_mu" + fmt(r.mu) : "_uniform") +
                             "_plot.dat";
    auto f = open_out(s.out_dir / name);
    write_plot_data(f, r);
  }
  out << "wrote " << csv.string() << '\n';
  return kExitOk;
}

void print_breaks(std::ostream& out, const KnotVector& kv) {
  for (std::size_t i = 0; i < kv.breakpoints().size(); ++i) out << (i ? " " : "") << fmt(kv.breakpoints()[i]);
  out << "\n  sigma (max adjacent ratio) = " << fmt(max_adjacent_ratio(kv)) << '\n';
}

struct PreviewArgs {
  int n = 4;
  double mu = 0.5;
  double s_star = 0.0;
};

int cmd_grade_preview(const RunConfig& c, bool use_case, const PreviewArgs& a, std::ostream& out) {
  if (!use_case) {
    if (a.n < 1) throw ParseError("n must be positive");
    if (!(a.mu > 0.0 && a.mu <= 1.0)) throw ParseError("mu must lie in (0,1]");
    if (!(a.s_star >= 0.0 && a.s_star <= 1.0)) throw ParseError("s-star must lie in [0,1]");
    const KnotVector kv = KnotVector::from_breakpoints(c.k, grade_knots_1d(a.n, a.mu, a.s_star));
    out << "n=" << a.n << "  mu=" << fmt(a.mu) << "  s*=" << fmt(a.s_star) << '\n';
    print_breaks(out, kv);
    return kExitOk;
  }
  Setup s = resolve(c, std::nullopt);
  const int n = s.conv.n0 << c.level;
  const MultiPatchProblem pb = build_problem(s.bc, n, s.conv.disc);
  out << "case " << s.bc.name << "  k=" << c.k << "  mu=" << fmt(s.conv.disc.grading ? s.conv.disc.mu : 1.0)
      << "  level=" << c.level << "  n=" << n << '\n';
  for (int p = 0; p < pb.geometry.num_patches(); ++p) {
    for (int dir = 0; dir < pb.dim(); ++dir) {
      out << "patch " << p << " direction " << dir;
      if (!pb.singular[p] || !(*pb.singular[p])[dir]) {
        out << " (uniform)";
      } else {
        out << " (s*=" << fmt(*(*pb.singular[p])[dir]) << ")";
      }
      out << ":\n  ";
      print_breaks(out, pb.spaces[p].knots(dir));
    }
  }
  return kExitOk;
}

int cmd_list(std::ostream& out) {
  for (const auto& name : case_names()) {
    const BenchmarkCase bc = make_case(name);
    out << std::left << std::setw(10) << name << std::right << " d=" << bc.geometry.dim()
        << " patches=" << bc.geometry.num_patches();
    if (bc.singular_point) out << " lambda=" << fmt(bc.lambda);
    if (!bc.recommended.empty()) {
      out << " graded runs:";
      for (const auto& [k, mu] : bc.recommended) out << " (k=" << k << ", mu=" << fmt(mu) << ")";
    }
    out << "\n    " << bc.description << '\n';
  }
  return kExitOk;
}

// Flags that mirror RunConfig keys; only flags given on the command line
// override the config file.
struct Flags {
  std::string config;
  RunConfig v;
  std::optional<std::string> out;
  std::map<std::string, CLI::Option*> opt;

  void add(CLI::App* app, bool with_levels) {
    app->add_option("--config", config, "key = value configuration file");
    opt["case"] = app->add_option("--case", v.case_name, "benchmark case (see list-cases)");
    opt["geometry"] = app->add_option("--geometry", v.geometry, "multipatch geometry file");
    opt["k"] = app->add_option("-k,--k", v.k, "spline degree");
    opt["mu"] = app->add_option("--mu", v.mu, "grading parameter in (0,1] or 'auto'");
    opt["eta"] = app->add_option("--eta", v.eta, "penalty parameter or 'default'");
    if (with_levels) opt["levels"] = app->add_option("--levels", v.levels, "finest level S");
    opt["level"] = app->add_option("--level", v.level, "refinement level s (n = 2^(s+1))");
    opt["out"] = app->add_option("--out", v.out, "output directory");
    opt["tol"] = app->add_option("--tol", v.tol, "relative residual tolerance");
    opt["grading"] = app->add_flag("--no-grading", "use uniform meshes");
    if (with_levels) opt["both"] = app->add_flag("--both", v.both, "run with and without grading");
    opt["solver"] = app->add_option("--solver", v.solver, "auto, cg, dense or sparse");
    opt["penalty"] = app->add_option("--penalty-scale", v.penalty, "local or patch");
    opt["samples"] = app->add_option("--samples", v.samples, "field dump points per direction");
  }

  RunConfig merged() {
    RunConfig c = config.empty() ? RunConfig{} : parse_config_file(config);
    auto given = [&](const char* k) { return opt.count(k) && opt[k]->count() > 0; };
    if (given("case")) c.case_name = v.case_name;
    if (given("geometry")) c.geometry = v.geometry;
    if (given("case") && !given("geometry")) c.geometry.clear();
    if (given("geometry") && !given("case")) c.case_name.clear();
    if (given("k")) c.k = v.k;
    if (given("mu")) c.mu = number_or(v.mu, "auto", "mu", 0);
    if (given("eta")) c.eta = number_or(v.eta, "default", "eta", 0);
    if (given("levels")) c.levels = v.levels;
    if (given("level")) c.level = v.level;
    if (given("out")) {
      c.out = v.out;
      out = v.out;
    }
    if (given("tol")) c.tol = v.tol;
    if (given("grading")) c.grading = false;
    if (given("both")) c.both = true;
    if (given("solver")) c.solver = v.solver;
    if (given("penalty")) c.penalty = v.penalty;
    if (given("samples")) c.samples = v.samples;
    return c;
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multipatch dG isogeometric solver with graded meshes"};
  app.require_subcommand(1);
  Flags solve_flags;
  Flags rates_flags;
  Flags preview_flags;
  PreviewArgs pa;
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve one discretization and dump the field");
  solve_flags.add(solve_cmd, false);
  CLI::App* rates_cmd = app.add_subcommand("rates", "convergence study over levels 0..S");
  rates_flags.add(rates_cmd, true);
  CLI::App* preview_cmd = app.add_subcommand("grade-preview", "print graded breakpoints without assembling");
  preview_flags.add(preview_cmd, false);
  CLI::Option* n_opt = preview_cmd->add_option("--n", pa.n, "elements per direction (single knot vector)");
  preview_cmd->add_option("--s-star", pa.s_star, "singular parameter in [0,1] (single knot vector)");
  CLI::App* list_cmd = app.add_subcommand("list-cases", "list the benchmark cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (list_cmd->parsed()) return cmd_list(out);
    if (solve_cmd->parsed()) {
      const RunConfig c = solve_flags.merged();
      return cmd_solve(c, solve_flags.out, out);
    }
    if (rates_cmd->parsed()) {
      const RunConfig c = rates_flags.merged();
      return cmd_rates(c, rates_flags.out, out);
    }
    if (preview_cmd->parsed()) {
      RunConfig c = preview_flags.merged();
      const bool use_case = !c.case_name.empty() || !c.geometry.empty();
      if (!use_case) {
        if (n_opt->count() == 0 && preview_flags.opt["mu"]->count() == 0 && preview_flags.config.empty()) {
          throw ParseError("grade-preview needs --case/--geometry or --n/--mu/--s-star");
        }
        if (c.mu == "auto") throw ParseError("grade-preview of a single knot vector needs a numeric --mu");
        pa.mu = to_double(c.mu, "mu", 0);
      }
      return cmd_grade_preview(c, use_case, pa, out);
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IndefiniteError& e) {
    err << "stability failure: " << e.what() << "; increase --eta\n";
    return kExitNumerical;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    if (!e.residual_history.empty()) {
      err << "  residual history (first/last): " << e.residual_history.front() << " / " << e.residual_history.back()
          << '\n';
    }
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace dgiga
