#include "dgiga/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace dgiga {

double default_penalty(int k, int d) {
  if (k < 1) throw DomainError("degree must be >= 1");
  return 4.0 * (k + 1) * (k + d);
}

void validate_problem(const MultiPatchProblem& pb) {
  const int np = pb.geometry.num_patches();
  if (static_cast<int>(pb.spaces.size()) != np) {
    throw AssemblyError("one discretization space per patch required");
  }
  for (int p = 0; p < np; ++p) {
    if (pb.spaces[p].dim() != pb.geometry.dim()) {
      throw AssemblyError("discretization space dimension differs from geometry");
    }
    if (pb.spaces[p].degree() != pb.spaces[0].degree()) {
      throw AssemblyError("all patches must use the same degree");
    }
  }
  if (!pb.singular.empty() && static_cast<int>(pb.singular.size()) != np) {
    throw AssemblyError("singular-point data must be given per patch");
  }
  for (int p = 0; p < np; ++p) {
    try {
      pb.geometry.patch(p).orientation();
    } catch (const GeometryError& e) {
      throw GeometryError("patch " + std::to_string(p) + ": " + e.what());
    }
  }
  if (!(pb.penalty_eta > 0.0)) throw AssemblyError("penalty parameter must be positive");
  if (!pb.source || !pb.dirichlet) throw AssemblyError("source and Dirichlet data are required");
  // MultiPatch already rejects faces claimed twice; boundary faces are the
  // complement, so every face is covered exactly once.
}

namespace {


// Smallest local distance across the element in the direction normal to
// `face`: min over Gauss points of h_dir / |J^{-T} e_dir|. Equals |E| / |F|
// on affine elements and shrinks where the Jacobian degenerates.
double normal_extent(const Patch& patch, const TensorSpace& space, const std::array<int, 3>& elem,
                     int face, int npts) {
  const int d = patch.dim();
  const int dir = face_direction(face);
  const auto box = space.element_box(elem);
  const QuadRule vol = tensor_rule(npts, d);
  const double hdir = box[dir][1] - box[dir][0];
  double h = std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < vol.points.size(); ++q) {
    Vec3 xh{0.0, 0.0, 0.0};
    for (int i = 0; i < d; ++i) xh[i] = box[i][0] + vol.points[q][i] * (box[i][1] - box[i][0]);
    const JacobianInfo jac = patch.jacobian(xh);
    const Mat3 G = inverse_transpose(jac.J, jac.det, d);
    Vec3 e{0.0, 0.0, 0.0};
    e[dir] = 1.0;
    h = std::min(h, hdir / norm(mat_vec(G, e, d), d));
  }
  return h;
}

}  // namespace

AssemblyContext::AssemblyContext(const MultiPatchProblem& problem) : problem_(&problem) {
  validate_problem(problem);
  const MultiPatch& mp = problem.geometry;
  const int np = mp.num_patches();
  const int d = mp.dim();
  const int k = problem.degree();
  const int npts = k + 1;

  dofs_.offset.assign(np + 1, 0);
  for (int p = 0; p < np; ++p) dofs_.offset[p + 1] = dofs_.offset[p] + problem.spaces[p].size();

  patch_h_.assign(np, 0.0);
  for (int p = 0; p < np; ++p) {
    const TensorSpace& sp = problem.spaces[p];
    double h = 0.0;
    for (int e = 0; e < sp.num_elements(); ++e) {
      h = std::max(h, mp.patch(p).box_diameter(sp.element_box(sp.element_multi(e))));
    }
    patch_h_[p] = h;
  }

  std::map<std::tuple<int, int, int>, double> local_h;
  auto side_h = [&](int p, int face, const std::array<int, 3>& elem) {
    if (problem.penalty_scale == PenaltyScale::PatchMax) return patch_h_[p];
    const TensorSpace& sp = problem.spaces[p];
    const auto key = std::make_tuple(p, face, sp.flat_element(elem));
    auto it = local_h.find(key);
    if (it != local_h.end()) return it->second;
    const double h = normal_extent(mp.patch(p), sp, elem, face, npts);
    local_h.emplace(key, h);
    return h;
  };

  const double eta = problem.penalty_eta;
  for (const auto& itf : mp.interfaces()) {
    FaceData fd;
    fd.rule = interface_rule(mp.patch(itf.patch_a), problem.spaces[itf.patch_a], mp.patch(itf.patch_b),
                             problem.spaces[itf.patch_b], itf, npts);
    for (const auto& cell : fd.rule.cells) {
      const double ha = side_h(itf.patch_a, itf.face_a, cell.elem_a);
      const double hb = side_h(itf.patch_b, itf.face_b, cell.elem_b);
      fd.sigma.push_back(eta * (mp.alpha(itf.patch_a) / ha + mp.alpha(itf.patch_b) / hb));
      fd.norm_sigma.push_back(eta * (mp.alpha(itf.patch_a) / patch_h_[itf.patch_a] +
                                     mp.alpha(itf.patch_b) / patch_h_[itf.patch_b]));
    }
    interfaces_.push_back(std::move(fd));
  }
  for (const auto& bf : mp.boundary_faces()) {
    FaceData fd;
    fd.rule = boundary_rule(mp.patch(bf.patch), problem.spaces[bf.patch], bf.patch, bf.face, npts);
    for (const auto& cell : fd.rule.cells) {
      fd.sigma.push_back(eta * mp.alpha(bf.patch) / side_h(bf.patch, bf.face, cell.elem_a));
      fd.norm_sigma.push_back(eta * mp.alpha(bf.patch) / patch_h_[bf.patch]);
    }
    boundaries_.push_back(std::move(fd));
  }

  // Sparsity: tensor band within each patch, plus cross-patch couplings from
  // interface cells.
  const int n = dofs_.size();
  std::vector<std::vector<int>> cross(n);
  for (const auto& fd : interfaces_) {
    const int pa = fd.rule.patch_a;
    const int pb = fd.rule.patch_b;
    const TensorSpace& sa = problem.spaces[pa];
    const TensorSpace& sb = problem.spaces[pb];
    const int p1 = k + 1;
    const int nact = sa.active_per_element();
    for (const auto& cell : fd.rule.cells) {
      std::vector<int> da(nact);
      std::vector<int> db(nact);
      for (int a = 0; a < nact; ++a) {
        std::array<int, 3> ma{0, 0, 0};
        std::array<int, 3> mb{0, 0, 0};
        int rem = a;
        for (int i = 0; i < d; ++i) {
          const int l = rem % p1;
          rem /= p1;
          ma[i] = cell.elem_a[i] + l;
          mb[i] = cell.elem_b[i] + l;
        }
        da[a] = dofs_.global(pa, sa.flat_index(ma));
        db[a] = dofs_.global(pb, sb.flat_index(mb));
      }
      for (int r : da) cross[r].insert(cross[r].end(), db.begin(), db.end());
      for (int r : db) cross[r].insert(cross[r].end(), da.begin(), da.end());
    }
  }
  pattern_.assign(n, {});
  for (int p = 0; p < np; ++p) {
    const TensorSpace& sp = problem.spaces[p];
    for (int loc = 0; loc < sp.size(); ++loc) {
      const int row = dofs_.global(p, loc);
      const auto m = sp.multi_index(loc);
      std::array<int, 3> lo{0, 0, 0};
      std::array<int, 3> hi{0, 0, 0};
      for (int i = 0; i < d; ++i) {
        lo[i] = std::max(0, m[i] - k);
        hi[i] = std::min(sp.num_basis(i) - 1, m[i] + k);
      }
      std::vector<int> cols;
      for (int c2 = lo[2]; c2 <= hi[2]; ++c2)
        for (int c1 = lo[1]; c1 <= hi[1]; ++c1)
          for (int c0 = lo[0]; c0 <= hi[0]; ++c0) cols.push_back(dofs_.global(p, sp.flat_index({c0, c1, c2})));
      auto& cr = cross[row];
      std::sort(cr.begin(), cr.end());
      cr.erase(std::unique(cr.begin(), cr.end()), cr.end());
      std::vector<int> merged;
      merged.reserve(cols.size() + cr.size());
      std::merge(cols.begin(), cols.end(), cr.begin(), cr.end(), std::back_inserter(merged));
      pattern_[row] = std::move(merged);
      std::vector<int>().swap(cr);
    }
  }
}

int AssemblyContext::volume_points(int patch, const std::array<int, 3>& elem, int base) const {
  const MultiPatchProblem& pb = *problem_;
  if (pb.singular.empty() || !pb.singular[patch]) return base;
  const SingularParam& s = *pb.singular[patch];
  const auto box = pb.spaces[patch].element_box(elem);
  bool touches = false;
  for (int i = 0; i < pb.dim(); ++i) {
    if (!s[i]) continue;
    touches = true;
    if (*s[i] < box[i][0] || *s[i] > box[i][1]) return base;
  }
  return touches ? std::max(base, 2 * (pb.degree() + 1)) : base;
}

// ---------------------------------------------------------------------------

PointBasis eval_physical(const MultiPatchProblem& problem, const DofMap& dofs, int p,
                         const std::array<int, 3>& elem, const Vec3& xhat) {
  const int d = problem.dim();
  const ActiveSet act = tensor_eval_on_element(problem.spaces[p], elem, xhat, true);
  JacobianInfo jac;
  PointBasis pbs;
  pbs.x = problem.geometry.patch(p).map_with_jacobian(xhat, jac);
  pbs.det = jac.det;
  const Mat3 G = inverse_transpose(jac.J, jac.det, d);
  pbs.dofs.resize(act.indices.size());
  pbs.values = act.values;
  pbs.grads.resize(act.indices.size());
  for (std::size_t a = 0; a < act.indices.size(); ++a) {
    pbs.dofs[a] = dofs.global(p, act.indices[a]);
    pbs.grads[a] = mat_vec(G, act.gradients[a], d);
  }
  return pbs;
}

FieldValue eval_field(const PointBasis& basis, std::span<const double> coeffs, int dim) {
  FieldValue f;
  for (std::size_t a = 0; a < basis.dofs.size(); ++a) {
    const double c = coeffs[basis.dofs[a]];
    f.value += c * basis.values[a];
    for (int i = 0; i < dim; ++i) f.grad[i] += c * basis.grads[a][i];
  }
  return f;
}

namespace {

// Adds a dense block with sorted column list `cols` into row `row`.
void scatter_row(CsrMatrix& A, int row, const int* cols, const double* vals, int count) {
  std::size_t p = A.row_ptr[row];
  const std::size_t end = A.row_ptr[row + 1];
  for (int j = 0; j < count; ++j) {
    while (p < end && A.cols[p] < cols[j]) ++p;
    if (p == end || A.cols[p] != cols[j]) throw AssemblyError("entry outside sparsity pattern");
    A.vals[p] += vals[j];
  }
}

void scatter_unsorted(CsrMatrix& A, int row, int col, double v) {
  const std::size_t p = A.find(row, col);
  if (p == CsrMatrix::npos) throw AssemblyError("entry outside sparsity pattern");
  A.vals[p] += v;
}

// Per-thread workspace for one volume element.
struct VolumeWork {
  std::vector<double> K;
  std::vector<double> F;
  std::vector<int> dofs;
  std::vector<double> N;
  std::vector<Vec3> g;
  std::vector<double> val1d;  // [dir][q][a]
  std::vector<double> der1d;
};

void element_volume(const MultiPatchProblem& pb, const DofMap& dofs, int p,
                    const std::array<int, 3>& elem, int npts, VolumeWork& w) {
  const int d = pb.dim();
  const int k = pb.degree();
  const int p1 = k + 1;
  const TensorSpace& sp = pb.spaces[p];
  const Patch& patch = pb.geometry.patch(p);
  const double alpha = pb.geometry.alpha(p);
  int nact = 1;
  int nq = 1;
  for (int i = 0; i < d; ++i) {
    nact *= p1;
    nq *= npts;
  }
  w.K.assign(static_cast<std::size_t>(nact) * nact, 0.0);
  w.F.assign(nact, 0.0);
  w.dofs.resize(nact);
  w.N.resize(nact);
  w.g.resize(nact);
  w.val1d.resize(static_cast<std::size_t>(3) * npts * p1);
  w.der1d.resize(static_cast<std::size_t>(3) * npts * p1);

  const GaussRule1d gl = gauss_legendre(npts);
  const auto box = sp.element_box(elem);
  double box_measure = 1.0;
  for (int i = 0; i < d; ++i) {
    box_measure *= box[i][1] - box[i][0];
    for (int q = 0; q < npts; ++q) {
      const double t = box[i][0] + gl.points[q] * (box[i][1] - box[i][0]);
      double* v = &w.val1d[(static_cast<std::size_t>(i) * npts + q) * p1];
      double* dv = &w.der1d[(static_cast<std::size_t>(i) * npts + q) * p1];
      sp.knots(i).eval_on_element(elem[i], t, std::span(v, p1), std::span(dv, p1));
    }
  }
  for (int a = 0; a < nact; ++a) {
    std::array<int, 3> m{0, 0, 0};
    int rem = a;
    for (int i = 0; i < d; ++i) {
      m[i] = elem[i] + rem % p1;
      rem /= p1;
    }
    w.dofs[a] = dofs.global(p, sp.flat_index(m));
  }

  for (int q = 0; q < nq; ++q) {
    std::array<int, 3> qi{0, 0, 0};
    int rem = q;
    Vec3 xh{0.0, 0.0, 0.0};
    double wq = box_measure;
    for (int i = 0; i < d; ++i) {
      qi[i] = rem % npts;
      rem /= npts;
      xh[i] = box[i][0] + gl.points[qi[i]] * (box[i][1] - box[i][0]);
      wq *= gl.weights[qi[i]];
    }
    JacobianInfo jac;
    const Vec3 x = patch.map_with_jacobian(xh, jac);
    if (!(std::abs(jac.det) > 0.0)) {
      std::ostringstream os;
      os << "singular Jacobian in patch " << p << " at parameter (" << xh[0] << ", " << xh[1] << ", "
         << xh[2] << ")";
      throw GeometryError(os.str());
    }
    const Mat3 G = inverse_transpose(jac.J, jac.det, d);
    const double wdet = wq * std::abs(jac.det);
    for (int a = 0; a < nact; ++a) {
      int r = a;
      std::array<int, 3> l{0, 0, 0};
      for (int i = 0; i < d; ++i) {
        l[i] = r % p1;
        r /= p1;
      }
      double vals[3];
      double ders[3];
      for (int i = 0; i < d; ++i) {
        const std::size_t off = (static_cast<std::size_t>(i) * npts + qi[i]) * p1 + l[i];
        vals[i] = w.val1d[off];
        ders[i] = w.der1d[off];
      }
      Vec3 gh{0.0, 0.0, 0.0};
      double n = 1.0;
      for (int i = 0; i < d; ++i) n *= vals[i];
      for (int gd = 0; gd < d; ++gd) {
        double prod = 1.0;
        for (int i = 0; i < d; ++i) prod *= (i == gd) ? ders[i] : vals[i];
        gh[gd] = prod;
      }
      w.N[a] = n;
      w.g[a] = mat_vec(G, gh, d);
    }
    const double fx = pb.source(x);
    const double ka = alpha * wdet;
    for (int a = 0; a < nact; ++a) {
      w.F[a] += wdet * fx * w.N[a];
      const Vec3& ga = w.g[a];
      double* Krow = &w.K[static_cast<std::size_t>(a) * nact];
      for (int b = a; b < nact; ++b) {
        const Vec3& gb = w.g[b];
        Krow[b] += ka * (ga[0] * gb[0] + ga[1] * gb[1] + ga[2] * gb[2]);
      }
    }
  }
  for (int a = 0; a < nact; ++a)
    for (int b = 0; b < a; ++b) w.K[static_cast<std::size_t>(a) * nact + b] = w.K[static_cast<std::size_t>(b) * nact + a];
}

void add_element(DgSystem& sys, const VolumeWork& w) {
  const int nact = static_cast<int>(w.dofs.size());
  for (int a = 0; a < nact; ++a) {
    scatter_row(sys.matrix, w.dofs[a], w.dofs.data(), &w.K[static_cast<std::size_t>(a) * nact], nact);
    sys.rhs[w.dofs[a]] += w.F[a];
  }
}

DgSystem empty_system(const AssemblyContext& ctx) {
  DgSystem sys;
  sys.matrix = ctx.empty_matrix();
  sys.rhs.assign(ctx.dofs().size(), 0.0);
  sys.dofs = ctx.dofs();
  return sys;
}

void add_volume(const AssemblyContext& ctx, DgSystem& sys, Exec exec) {
  const MultiPatchProblem& pb = ctx.problem();
  const int d = pb.dim();
  const int p1 = pb.degree() + 1;
  const int base = p1;
  for (int p = 0; p < pb.geometry.num_patches(); ++p) {
    const TensorSpace& sp = pb.spaces[p];
    const int ne = sp.num_elements();
    // Elements of one color are at least k+1 apart in some direction, so
    // their dof sets are disjoint and each matrix row is touched by at most
    // one element per color. The serial path walks the same colors, which
    // makes both paths bitwise identical.
    int ncolors = 1;
    for (int i = 0; i < d; ++i) ncolors *= p1;
    std::vector<std::vector<int>> by_color(ncolors);
    for (int e = 0; e < ne; ++e) {
      const auto em = sp.element_multi(e);
      int c = 0;
      for (int i = d - 1; i >= 0; --i) c = c * p1 + em[i] % p1;
      by_color[c].push_back(e);
    }
    std::string failure;
    for (const auto& elems : by_color) {
      if (exec == Exec::Serial) {
        VolumeWork w;
        for (int e : elems) {
          const auto em = sp.element_multi(e);
          element_volume(pb, ctx.dofs(), p, em, ctx.volume_points(p, em, base), w);
          add_element(sys, w);
        }
        continue;
      }
      const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(elems.size());
#pragma omp parallel
      {
        VolumeWork w;
#pragma omp for schedule(dynamic, 16)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
          try {
            const auto em = sp.element_multi(elems[i]);
            element_volume(pb, ctx.dofs(), p, em, ctx.volume_points(p, em, base), w);
            add_element(sys, w);
          } catch (const std::exception& ex) {
#pragma omp critical
            if (failure.empty()) failure = ex.what();
          }
        }
      }
      if (!failure.empty()) throw GeometryError(failure);
    }
  }
}

// Local face matrix on the concatenated dofs [side a, side b].
void add_face(const AssemblyContext& ctx, const FaceData& fd, DgSystem& sys, bool with_rhs) {
  const MultiPatchProblem& pb = ctx.problem();
  const int d = pb.dim();
  const bool itf = fd.rule.is_interface;
  const int pa = fd.rule.patch_a;
  const int pbi = fd.rule.patch_b;
  const double alpha_a = pb.geometry.alpha(pa);
  const double alpha_b = itf ? pb.geometry.alpha(pbi) : 0.0;

  std::vector<int> dofs;
  std::vector<double> M;
  std::vector<double> F;
  std::vector<double> jump;
  std::vector<double> flux;
  for (std::size_t c = 0; c < fd.rule.cells.size(); ++c) {
    const FaceCell& cell = fd.rule.cells[c];
    const double sigma = fd.sigma[c];
    bool first = true;
    int n = 0;
    for (const FaceQuadPoint& qp : cell.points) {
      const PointBasis ba = eval_physical(pb, ctx.dofs(), pa, cell.elem_a, qp.xhat_a);
      PointBasis bb;
      if (itf) bb = eval_physical(pb, ctx.dofs(), pbi, cell.elem_b, qp.xhat_b);
      if (first) {
        dofs = ba.dofs;
        if (itf) dofs.insert(dofs.end(), bb.dofs.begin(), bb.dofs.end());
        n = static_cast<int>(dofs.size());
        M.assign(static_cast<std::size_t>(n) * n, 0.0);
        F.assign(n, 0.0);
        jump.resize(n);
        flux.resize(n);
        first = false;
      }
      const int na = static_cast<int>(ba.dofs.size());
      const double avg = itf ? 0.5 : 1.0;
      for (int a = 0; a < na; ++a) {
        jump[a] = ba.values[a];
        flux[a] = avg * alpha_a * dot(ba.grads[a], qp.normal, d);
      }
      if (itf) {
        for (int b = 0; b < na; ++b) {
          jump[na + b] = -bb.values[b];
          flux[na + b] = avg * alpha_b * dot(bb.grads[b], qp.normal, d);
        }
      }
      const double w = qp.weight;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          M[static_cast<std::size_t>(i) * n + j] +=
              w * (-flux[j] * jump[i] - flux[i] * jump[j] + sigma * jump[i] * jump[j]);
        }
      }
      if (with_rhs && !itf) {
        const double g = pb.dirichlet(qp.x);
        for (int i = 0; i < n; ++i) F[i] += w * (-flux[i] * g + sigma * g * jump[i]);
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) scatter_unsorted(sys.matrix, dofs[i], dofs[j], M[static_cast<std::size_t>(i) * n + j]);
      if (with_rhs && !itf) sys.rhs[dofs[i]] += F[i];
    }
  }
}

}  // namespace

DgSystem assemble_volume(const AssemblyContext& ctx, Exec exec) {
  DgSystem sys = empty_system(ctx);
  add_volume(ctx, sys, exec);
  return sys;
}

DgSystem assemble_interface(const AssemblyContext& ctx) {
  DgSystem sys = empty_system(ctx);
  for (const auto& fd : ctx.interfaces()) add_face(ctx, fd, sys, false);
  return sys;
}

DgSystem assemble_boundary(const AssemblyContext& ctx) {
  DgSystem sys = empty_system(ctx);
  for (const auto& fd : ctx.boundaries()) add_face(ctx, fd, sys, true);
  return sys;
}

DgSystem assemble(const AssemblyContext& ctx, Exec exec) {
  DgSystem sys = empty_system(ctx);
  add_volume(ctx, sys, exec);
  for (const auto& fd : ctx.interfaces()) add_face(ctx, fd, sys, false);
  for (const auto& fd : ctx.boundaries()) add_face(ctx, fd, sys, true);
  return sys;
}

}  // namespace dgiga
