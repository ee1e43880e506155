#include "dgiga/multipatch.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dgiga {

std::array<double, 2> FaceOrientation::apply(const std::array<double, 2>& u) const {
  std::array<double, 2> w = swap ? std::array<double, 2>{u[1], u[0]} : u;
  for (int m = 0; m < 2; ++m) {
    if (flip[m]) w[m] = 1.0 - w[m];
  }
  return w;
}

MultiPatch::MultiPatch(std::vector<Patch> patches, std::vector<double> alpha,
                       std::vector<InterfaceSpec> interfaces)
    : patches_(std::move(patches)), alpha_(std::move(alpha)), interfaces_(std::move(interfaces)) {
  if (patches_.empty()) throw GeometryError("multipatch needs at least one patch");
  if (alpha_.size() != patches_.size()) {
    throw GeometryError("one diffusion coefficient per patch required");
  }
  for (double a : alpha_) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("diffusion coefficient must be positive");
  }
  const int d = patches_[0].dim();
  for (const auto& p : patches_) {
    if (p.dim() != d) throw GeometryError("patches of mixed dimension");
  }
  std::set<std::pair<int, int>> claimed;
  for (const auto& itf : interfaces_) {
    for (auto [p, f] : {std::pair{itf.patch_a, itf.face_a}, std::pair{itf.patch_b, itf.face_b}}) {
      if (p < 0 || p >= num_patches() || f < 0 || f >= 2 * d) {
        throw GeometryError("interface references a nonexistent patch face");
      }
      if (!claimed.insert({p, f}).second) {
        std::ostringstream os;
        os << "face " << f << " of patch " << p << " appears in two interfaces";
        throw GeometryError(os.str());
      }
    }
  }
}

std::vector<BoundaryFace> MultiPatch::boundary_faces() const {
  std::set<std::pair<int, int>> claimed;
  for (const auto& itf : interfaces_) {
    claimed.insert({itf.patch_a, itf.face_a});
    claimed.insert({itf.patch_b, itf.face_b});
  }
  std::vector<BoundaryFace> out;
  for (int p = 0; p < num_patches(); ++p) {
    for (int f = 0; f < 2 * dim(); ++f) {
      if (!claimed.count({p, f})) out.push_back({p, f});
    }
  }
  return out;
}

std::vector<InterfaceSpec> detect_interfaces(const std::vector<Patch>& patches, double tol) {
  std::vector<InterfaceSpec> out;
  if (patches.empty()) return out;
  const int d = patches[0].dim();
  const int nfaces = 2 * d;
  std::vector<std::array<double, 2>> samples;
  const double grid[3] = {0.0, 0.5, 1.0};
  if (d == 2) {
    for (double a : grid) samples.push_back({a, 0.0});
  } else {
    for (double b : grid)
      for (double a : grid) samples.push_back({a, b});
  }
  std::vector<FaceOrientation> candidates;
  for (int s = 0; s < (d == 3 ? 2 : 1); ++s)
    for (int f0 = 0; f0 < 2; ++f0)
      for (int f1 = 0; f1 < (d == 3 ? 2 : 1); ++f1)
        candidates.push_back({s == 1, {f0 == 1, f1 == 1}});

  std::set<std::pair<int, int>> used;
  for (int pa = 0; pa < static_cast<int>(patches.size()); ++pa) {
    for (int fa = 0; fa < nfaces; ++fa) {
      if (used.count({pa, fa})) continue;
      bool found = false;
      for (int pb = pa + 1; pb < static_cast<int>(patches.size()) && !found; ++pb) {
        for (int fb = 0; fb < nfaces && !found; ++fb) {
          if (used.count({pb, fb})) continue;
          for (const auto& orient : candidates) {
            bool match = true;
            for (const auto& u : samples) {
              const Vec3 xa = patches[pa].map_point(patches[pa].face_to_param(fa, u));
              const Vec3 xb = patches[pb].map_point(patches[pb].face_to_param(fb, orient.apply(u)));
              Vec3 diff{};
              for (int i = 0; i < d; ++i) diff[i] = xa[i] - xb[i];
              if (norm(diff, d) > tol) {
                match = false;
                break;
              }
            }
            if (match) {
              out.push_back({pa, fa, pb, fb, orient});
              used.insert({pa, fa});
              used.insert({pb, fb});
              found = true;
              break;
            }
          }
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// File IO

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

class Tokenizer {
 public:
  explicit Tokenizer(std::istream& in) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) tokens_.push_back({tok, lineno});
    }
  }
  bool done() const { return pos_ >= tokens_.size(); }
  std::string next() {
    if (done()) throw ParseError("unexpected end of multipatch file");
    return tokens_[pos_++].text;
  }
  const std::string& peek() const { return tokens_[pos_].text; }
  int line() const { return done() ? -1 : tokens_[pos_].line; }
  double number() {
    const int ln = line();
    const std::string t = next();
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(ln) + ": expected a number, got '" + t + "'");
    }
  }
  int integer() {
    const int ln = line();
    const double v = number();
    if (v != std::floor(v)) throw ParseError("line " + std::to_string(ln) + ": expected an integer");
    return static_cast<int>(v);
  }
  void expect(const std::string& word) {
    const int ln = line();
    const std::string t = next();
    if (t != word) {
      throw ParseError("line " + std::to_string(ln) + ": expected '" + word + "', got '" + t + "'");
    }
  }

 private:
  struct Token {
    std::string text;
    int line;
  };
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

MultiPatchFile read_multipatch(std::istream& in) {
  Tokenizer tk(in);
  tk.expect("dgiga-multipatch");
  if (tk.integer() != 1) throw ParseError("unsupported multipatch format version");
  tk.expect("dim");
  const int d = tk.integer();
  if (d < 2 || d > 3) throw ParseError("dim must be 2 or 3");

  MultiPatchFile out;
  std::vector<Patch> patches;
  std::vector<double> alpha;
  std::vector<InterfaceSpec> interfaces;
  while (!tk.done()) {
    const int ln = tk.line();
    const std::string key = tk.next();
    if (key == "patch") {
      const int id = tk.integer();
      if (id != static_cast<int>(patches.size())) {
        throw ParseError("line " + std::to_string(ln) + ": patches must be numbered consecutively from 0");
      }
      tk.expect("degree");
      const int k = tk.integer();
      std::vector<KnotVector> dirs;
      for (int dir = 0; dir < d; ++dir) {
        tk.expect("knots");
        std::vector<double> U;
        while (!tk.done() && tk.peek() != "knots" && tk.peek() != "alpha") U.push_back(tk.number());
        dirs.emplace_back(k, std::move(U));
      }
      tk.expect("alpha");
      alpha.push_back(tk.number());
      tk.expect("control");
      const int count = tk.integer();
      std::vector<Vec3> cps(count, Vec3{0.0, 0.0, 0.0});
      for (int c = 0; c < count; ++c) {
        for (int i = 0; i < d; ++i) cps[c][i] = tk.number();
      }
      tk.expect("end");
      patches.emplace_back(TensorSpace(std::move(dirs)), std::move(cps));
    } else if (key == "interface") {
      InterfaceSpec s;
      s.patch_a = tk.integer();
      s.face_a = tk.integer();
      s.patch_b = tk.integer();
      s.face_b = tk.integer();
      s.orient.swap = tk.integer() != 0;
      s.orient.flip[0] = tk.integer() != 0;
      s.orient.flip[1] = tk.integer() != 0;
      interfaces.push_back(s);
    } else if (key == "case") {
      out.case_name = tk.next();
    } else if (key == "singular") {
      Vec3 p{0.0, 0.0, 0.0};
      for (int i = 0; i < d; ++i) p[i] = tk.number();
      out.singular_point = p;
    } else if (key == "graded") {
      out.graded = {false, false, false};
      for (int i = 0; i < d; ++i) out.graded[i] = tk.integer() != 0;
    } else if (key == "source") {
      out.source = tk.number();
    } else if (key == "dirichlet") {
      out.dirichlet = tk.number();
    } else {
      throw ParseError("line " + std::to_string(ln) + ": unknown keyword '" + key + "'");
    }
  }
  out.geometry = MultiPatch(std::move(patches), std::move(alpha), std::move(interfaces));
  return out;
}

MultiPatchFile read_multipatch_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open multipatch file '" + path + "'");
  return read_multipatch(in);
}

void write_multipatch(std::ostream& out, const MultiPatchFile& file) {
  const MultiPatch& mp = file.geometry;
  const int d = mp.dim();
  std::ostringstream os;
  os << "dgiga-multipatch 1\n";
  os << "dim " << d << "\n";
  for (int p = 0; p < mp.num_patches(); ++p) {
    const Patch& patch = mp.patch(p);
    os << "patch " << p << "\n";
    os << "  degree " << patch.space().degree() << "\n";
    for (int dir = 0; dir < d; ++dir) {
      os << "  knots";
      for (double t : patch.space().knots(dir).knots()) os << ' ' << shortest(t);
      os << "\n";
    }
    os << "  alpha " << shortest(mp.alpha(p)) << "\n";
    os << "  control " << patch.control_points().size() << "\n";
    for (const Vec3& c : patch.control_points()) {
      os << "   ";
      for (int i = 0; i < d; ++i) os << ' ' << shortest(c[i]);
      os << "\n";
    }
    os << "end\n";
  }
  for (const auto& s : mp.interfaces()) {
    os << "interface " << s.patch_a << ' ' << s.face_a << ' ' << s.patch_b << ' ' << s.face_b << ' '
       << int(s.orient.swap) << ' ' << int(s.orient.flip[0]) << ' ' << int(s.orient.flip[1]) << "\n";
  }
  if (!file.case_name.empty()) os << "case " << file.case_name << "\n";
  if (file.singular_point) {
    os << "singular";
    for (int i = 0; i < d; ++i) os << ' ' << shortest((*file.singular_point)[i]);
    os << "\n";
  }
  os << "graded";
  for (int i = 0; i < d; ++i) os << ' ' << int(file.graded[i]);
  os << "\n";
  if (file.source != 0.0) os << "source " << shortest(file.source) << "\n";
  if (file.dirichlet != 0.0) os << "dirichlet " << shortest(file.dirichlet) << "\n";
  out << os.str();
}

}  // namespace dgiga
