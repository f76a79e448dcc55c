#include "wdirac/norms.hpp"

#include <algorithm>
#include <cmath>

#include "wdirac/fit.hpp"
#include "wdirac/quadrature.hpp"
#include "wdirac/rng.hpp"

namespace wdirac {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= double(i);
  return f;
}

int local_facet_index(const PeriodicMesh& mesh, int cell, int facet) {
  const int n = mesh.dim();
  for (int local = 0; local <= n; ++local)
    if (mesh.cell_face(cell, n - 1, local) == facet) return local;
  throw NumericalFailure("norms: facet is not a face of its incident cell");
}

double graded_norm2(const DeRhamComplex& rc, int k, const Vector& x) {
  if (x.empty()) return 0.0;
  return std::max(0.0, dot(x, rc.mass(k).matvec(x)));
}

// --- hierarchical cell-pair quadrature for the Slobodetskij double integral ---

// Sub-simplex of a top cell, tracked in the parent's barycentric coordinates
// so that subdivision needs no coordinate solves; positions stay in the
// parent's unwrapped frame and all distances go through the periodic metric.
struct SubSimplex {
  std::array<std::array<double, 4>, 4> lam{};
  std::array<std::array<double, 3>, 4> pos{};
  double measure = 0.0;
};

SubSimplex whole_cell(const PeriodicMesh& mesh, int cell) {
  const int n = mesh.dim();
  const double* q = mesh.coords(n, cell);
  SubSimplex t;
  for (int v = 0; v <= n; ++v) {
    t.lam[std::size_t(v)] = {0.0, 0.0, 0.0, 0.0};
    t.lam[std::size_t(v)][std::size_t(v)] = 1.0;
    t.pos[std::size_t(v)] = {0.0, 0.0, 0.0};
    for (int ax = 0; ax < n; ++ax) t.pos[std::size_t(v)][std::size_t(ax)] = q[v * n + ax];
  }
  t.measure = mesh.measure(n, cell);
  return t;
}

void midpoint(const SubSimplex& t, int a, int b, SubSimplex& out, int slot) {
  for (int i = 0; i < 4; ++i)
    out.lam[std::size_t(slot)][std::size_t(i)] =
        0.5 * (t.lam[std::size_t(a)][std::size_t(i)] + t.lam[std::size_t(b)][std::size_t(i)]);
  for (int i = 0; i < 3; ++i)
    out.pos[std::size_t(slot)][std::size_t(i)] =
        0.5 * (t.pos[std::size_t(a)][std::size_t(i)] + t.pos[std::size_t(b)][std::size_t(i)]);
}

// Midpoint refinement: equal-measure children, diameter halved. In 2d the
// fourth child is the inverted central triangle.
int subdivide(const SubSimplex& t, int n, std::array<SubSimplex, 4>& out) {
  if (n == 1) {
    out[0] = t;
    midpoint(t, 0, 1, out[0], 1);
    out[1] = t;
    midpoint(t, 0, 1, out[1], 0);
    out[0].measure = out[1].measure = 0.5 * t.measure;
    return 2;
  }
  for (int c = 0; c < 4; ++c) {
    out[std::size_t(c)] = t;
    out[std::size_t(c)].measure = 0.25 * t.measure;
  }
  midpoint(t, 0, 1, out[0], 1);
  midpoint(t, 0, 2, out[0], 2);
  midpoint(t, 0, 1, out[1], 0);
  midpoint(t, 1, 2, out[1], 2);
  midpoint(t, 0, 2, out[2], 0);
  midpoint(t, 1, 2, out[2], 1);
  midpoint(t, 0, 1, out[3], 0);
  midpoint(t, 1, 2, out[3], 1);
  midpoint(t, 0, 2, out[3], 2);
  return 4;
}

// The callback receives (cell_a, lambda_a, x_a, cell_b, lambda_b, x_b,
// weight, level) for every quadrature point pair; the weight already contains
// both measures, the symmetry factor of the unordered cell pair and the
// distance kernel. Positions are unwrapped cell-frame coordinates.
template <class Fn>
class PairEngine {
 public:
  PairEngine(const DeRhamComplex& rc, const SlobodetskijSpec& spec, Fn& fn)
      : mesh_(rc.mesh()), n_(rc.dim()), levels_(spec.levels), fn_(fn) {
    require(spec.s > 0.0 && spec.s < 0.5, "slobodetskij: order s must lie in (0, 1/2)");
    require(n_ <= 2, "slobodetskij: dimension 3 rejected, the cell-pair quadrature cost is quadratic");
    require(spec.quad_order >= 1 && spec.quad_order <= 12, "slobodetskij: quadrature order out of range");
    require(spec.levels >= 1 && spec.levels <= 10, "slobodetskij: subdivision depth out of range");
    const std::size_t cells = std::size_t(mesh_.count(n_));
    require(cells * cells <= spec.max_cell_pairs,
            "slobodetskij: cell-pair budget exceeded, coarsen the mesh or raise max_cell_pairs");
    rule_ = simplex_rule(n_, spec.quad_order);
    kernel_pow_ = double(n_) + 2.0 * spec.s;
    fact_ = factorial(n_);
    touch_tol_ = 1e-9 * mesh_.width();
    const std::size_t np = rule_.size();
    la_.resize(np);
    lb_.resize(np);
    xa_.resize(np);
    xb_.resize(np);
    wa_.assign(np, 0.0);
    wb_.assign(np, 0.0);
  }

  void run() {
    const int cells = mesh_.count(n_);
    for (int a = 0; a < cells; ++a) {
      const std::vector<int>& nb = mesh_.cell_neighbors(a);
      for (int b = a; b < cells; ++b) {
        const double sym = (a == b) ? 1.0 : 2.0;
        const SubSimplex sa = whole_cell(mesh_, a);
        const SubSimplex sb = whole_cell(mesh_, b);
        if (std::find(nb.begin(), nb.end(), b) == nb.end())
          integrate(a, sa, b, sb, sym, 0);
        else
          descend(a, sa, b, sb, sym, 1);
      }
    }
  }

 private:
  bool touching(const SubSimplex& a, const SubSimplex& b) const {
    for (int i = 0; i <= n_; ++i)
      for (int j = 0; j <= n_; ++j)
        if (mesh_.periodic_distance(a.pos[std::size_t(i)], b.pos[std::size_t(j)]) <= touch_tol_)
          return true;
    return false;
  }

  void descend(int ca, const SubSimplex& a, int cb, const SubSimplex& b, double sym, int level) {
    if (level > levels_) return;  // unresolved diagonal band; the caller bounds it
    std::array<SubSimplex, 4> childa, childb;
    const int nc = subdivide(a, n_, childa);
    subdivide(b, n_, childb);
    for (int i = 0; i < nc; ++i)
      for (int j = 0; j < nc; ++j) {
        if (touching(childa[std::size_t(i)], childb[std::size_t(j)]))
          descend(ca, childa[std::size_t(i)], cb, childb[std::size_t(j)], sym, level + 1);
        else
          integrate(ca, childa[std::size_t(i)], cb, childb[std::size_t(j)], sym, level);
      }
  }

  // Collapsed tensor rules are not symmetric under vertex permutations, so
  // nodes are placed in a geometric vertex order (lexicographic by position,
  // ties broadened to absorb roundoff). Ascending-id order would vary under
  // lattice shifts and break the translation invariance of the quadrature.
  void canonical_order(const SubSimplex& t, int idx[4]) const {
    const double tol = 1e-12 * mesh_.width();
    auto before = [&](int a, int b) {
      for (int ax = 0; ax < n_; ++ax) {
        const double d = t.pos[std::size_t(a)][std::size_t(ax)] - t.pos[std::size_t(b)][std::size_t(ax)];
        if (d < -tol) return true;
        if (d > tol) return false;
      }
      return false;
    };
    for (int i = 0; i <= n_; ++i) idx[i] = i;
    for (int i = 1; i <= n_; ++i) {
      const int v = idx[i];
      int j = i;
      while (j > 0 && before(v, idx[j - 1])) {
        idx[j] = idx[j - 1];
        --j;
      }
      idx[j] = v;
    }
  }

  void tabulate(const SubSimplex& t, std::vector<std::array<double, 4>>& lam,
                std::vector<std::array<double, 3>>& pos, Vector& w) {
    int idx[4];
    canonical_order(t, idx);
    const std::size_t np = rule_.size();
    for (std::size_t p = 0; p < np; ++p) {
      double ref[4];
      ref[0] = 1.0;
      for (int j = 0; j < n_; ++j) {
        ref[j + 1] = rule_.points[p][std::size_t(j)];
        ref[0] -= ref[j + 1];
      }
      lam[p] = {0.0, 0.0, 0.0, 0.0};
      pos[p] = {0.0, 0.0, 0.0};
      for (int v = 0; v <= n_; ++v) {
        const std::size_t cv = std::size_t(idx[v]);
        for (int i = 0; i <= n_; ++i)
          lam[p][std::size_t(i)] += ref[v] * t.lam[cv][std::size_t(i)];
        for (int i = 0; i < n_; ++i) pos[p][std::size_t(i)] += ref[v] * t.pos[cv][std::size_t(i)];
      }
      w[p] = fact_ * t.measure * rule_.weights[p];
    }
  }

  void integrate(int ca, const SubSimplex& a, int cb, const SubSimplex& b, double sym, int level) {
    tabulate(a, la_, xa_, wa_);
    tabulate(b, lb_, xb_, wb_);
    const std::size_t np = rule_.size();
    for (std::size_t p = 0; p < np; ++p)
      for (std::size_t q = 0; q < np; ++q) {
        const double d = mesh_.periodic_distance(xa_[p], xb_[q]);
        const double w = sym * wa_[p] * wb_[q] / std::pow(d, kernel_pow_);
        fn_(ca, la_[p], xa_[p], cb, lb_[q], xb_[q], w, level);
      }
  }

  const PeriodicMesh& mesh_;
  int n_;
  int levels_;
  Fn& fn_;
  QuadRule rule_;
  double kernel_pow_ = 0.0;
  double fact_ = 1.0;
  double touch_tol_ = 0.0;
  std::vector<std::array<double, 4>> la_, lb_;
  std::vector<std::array<double, 3>> xa_, xb_;
  Vector wa_, wb_;
};

}  // namespace

double broken_h1_jump(const DeRhamComplex& rc, const Cochain& u) {
  const PeriodicMesh& mesh = rc.mesh();
  const int n = mesh.dim();
  const int k = u.degree;
  require(k >= 0 && k <= n, "broken_h1_jump: degree out of range");
  require(u.values.size() == std::size_t(rc.dof_count(k)), "broken_h1_jump: size mismatch");
  const int comps = form_component_count(n, k);

  // volume term: components are affine per cell, so vertex values and the
  // barycentric gradients give the constant component gradients exactly
  double acc = 0.0;
  std::vector<double> vals(std::size_t(comps) * std::size_t(n + 1), 0.0);
  for (int cell = 0; cell < mesh.count(n); ++cell) {
    for (int v = 0; v <= n; ++v) {
      std::array<double, 4> lam{0.0, 0.0, 0.0, 0.0};
      lam[std::size_t(v)] = 1.0;
      rc.evaluate_in_cell(u, cell, lam, vals.data() + std::size_t(v) * std::size_t(comps));
    }
    const double* g = mesh.cell_gradients(cell);
    double cell2 = 0.0;
    for (int c = 0; c < comps; ++c) {
      double gx[3] = {0.0, 0.0, 0.0};
      for (int v = 0; v <= n; ++v) {
        const double a = vals[std::size_t(v) * std::size_t(comps) + std::size_t(c)];
        for (int ax = 0; ax < n; ++ax) gx[ax] += a * g[3 * v + ax];
      }
      cell2 += gx[0] * gx[0] + gx[1] * gx[1] + gx[2] * gx[2];
    }
    acc += mesh.measure(n, cell) * cell2;
  }

  // jump term: the full component vector of the representative across each
  // facet, integrated by a facet rule that is exact for the affine jump,
  // weighted by the inverse diameter of the plus-side cell
  const QuadRule rule = simplex_rule(n - 1, 4);
  const double fact = factorial(n - 1);
  const auto& subsets = ascending_subsets(n + 1, n);
  std::vector<double> vp(std::size_t(comps), 0.0), vm(std::size_t(comps), 0.0);
  for (const FacetPair& fp : mesh.facet_pairs()) {
    const auto& subp = subsets[std::size_t(local_facet_index(mesh, fp.cell_plus, fp.facet))];
    const auto& subm = subsets[std::size_t(local_facet_index(mesh, fp.cell_minus, fp.facet))];
    double jump2 = 0.0;
    for (std::size_t p = 0; p < rule.size(); ++p) {
      double ref[3];
      ref[0] = 1.0;
      for (int j = 0; j + 1 < n; ++j) {
        ref[j + 1] = rule.points[p][std::size_t(j)];
        ref[0] -= ref[j + 1];
      }
      std::array<double, 4> lp{0.0, 0.0, 0.0, 0.0}, lm{0.0, 0.0, 0.0, 0.0};
      for (int j = 0; j < n; ++j) {
        lp[std::size_t(subp[std::size_t(j)])] = ref[j];
        lm[std::size_t(subm[std::size_t(j)])] = ref[j];
      }
      rc.evaluate_in_cell(u, fp.cell_plus, lp, vp.data());
      rc.evaluate_in_cell(u, fp.cell_minus, lm, vm.data());
      double d2 = 0.0;
      for (int c = 0; c < comps; ++c) {
        const double d = vp[std::size_t(c)] - vm[std::size_t(c)];
        d2 += d * d;
      }
      jump2 += fact * mesh.measure(n - 1, fp.facet) * rule.weights[p] * d2;
    }
    acc += jump2 / mesh.diameter(n, fp.cell_plus);
  }
  return std::sqrt(std::max(acc, 0.0));
}

double broken_h1_jump(const DeRhamComplex& rc, const GradedCochain& u) {
  require(u.dim == rc.dim(), "broken_h1_jump: dimension mismatch");
  double acc = 0.0;
  for (int k = 0; k <= rc.dim(); ++k) {
    const double v = broken_h1_jump(rc, Cochain{k, u.values[std::size_t(k)]});
    acc += v * v;
  }
  return std::sqrt(acc);
}

double domain_seminorm(const DeRhamComplex& rc, const GradedCochain& u) {
  require(u.dim == rc.dim(), "domain_seminorm: dimension mismatch");
  const int n = rc.dim();
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    Cochain uk{k, u.values[std::size_t(k)]};
    require(uk.values.size() == std::size_t(rc.dof_count(k)), "domain_seminorm: size mismatch");
    if (k < n) {
      const Cochain du = rc.apply_d(uk);
      acc += graded_norm2(rc, k + 1, du.values);
    }
    if (k > 0) {
      const Cochain z = weak_codifferential(rc, uk);
      acc += graded_norm2(rc, k - 1, z.values);
    }
  }
  return std::sqrt(acc);
}

SymmetricMatrix domain_seminorm_gram(const DeRhamComplex& rc) {
  const int n = rc.dim();
  SymmetricMatrix y{std::size_t(rc.total_dof_count())};
  for (int k = 0; k <= n; ++k) {
    const int nk = rc.dof_count(k);
    const std::size_t off = std::size_t(rc.graded_offset(k));
    if (k < n) {
      const SparseMatrix& d = rc.coboundary_real(k);
      const SparseMatrix& m1 = rc.mass(k + 1);
      Vector ej(std::size_t(nk), 0.0);
      for (int j = 0; j < nk; ++j) {
        ej[std::size_t(j)] = 1.0;
        const Vector col = d.tmatvec(m1.matvec(d.matvec(ej)));
        for (int i = j; i < nk; ++i)
          y.lower(off + std::size_t(i), off + std::size_t(j)) += col[std::size_t(i)];
        ej[std::size_t(j)] = 0.0;
      }
    }
    if (k > 0) {
      // weak codifferential energy: with r_j = D^T M e_j the block is
      // r_i^T M_down^{-1} r_j, realized as C^T C with C = L^{-1} [r_1 .. ]
      const SparseMatrix& d = rc.coboundary_real(k - 1);
      const SparseMatrix& mk = rc.mass(k);
      const CholeskyFactor ch = cholesky(rc.mass_dense(k - 1));
      std::vector<Vector> c;
      c.resize(std::size_t(nk));
      Vector ej(std::size_t(nk), 0.0);
      for (int j = 0; j < nk; ++j) {
        ej[std::size_t(j)] = 1.0;
        Vector r = d.tmatvec(mk.matvec(ej));
        ch.solve_lower(r);
        c[std::size_t(j)] = std::move(r);
        ej[std::size_t(j)] = 0.0;
      }
      for (int j = 0; j < nk; ++j)
        for (int i = j; i < nk; ++i)
          y.lower(off + std::size_t(i), off + std::size_t(j)) +=
              dot(c[std::size_t(i)], c[std::size_t(j)]);
    }
  }
  return y;
}

namespace {

// Turns per-level accumulations of the pair quadrature into a value with a
// one-sided truncation bar: a geometric tail of the level increments bounds
// the dropped diagonal band. The worst-case ratio handles jump-driven mass,
// smooth parts decay faster.
SeminormValue finish_tail(const std::vector<double>& level_acc, const SlobodetskijSpec& spec) {
  double total = 0.0;
  for (double a : level_acc) total += a;
  total = std::max(total, 0.0);
  const double rho = std::pow(2.0, -(1.0 - 2.0 * spec.s));
  const double tail = level_acc[std::size_t(spec.levels)] * rho / (1.0 - rho);
  SeminormValue out;
  out.value = std::sqrt(total);
  out.error_bound = std::sqrt(total + std::max(tail, 0.0)) - out.value;
  return out;
}

}  // namespace

SeminormValue slobodetskij(const DeRhamComplex& rc, const Cochain& u,
                           const SlobodetskijSpec& spec) {
  require(u.degree >= 0 && u.degree <= rc.dim(), "slobodetskij: degree out of range");
  require(u.values.size() == std::size_t(rc.dof_count(u.degree)), "slobodetskij: size mismatch");
  const int comps = form_component_count(rc.dim(), u.degree);
  std::vector<double> level_acc(std::size_t(spec.levels) + 1, 0.0);
  double va[4], vb[4];
  auto fn = [&](int ca, const std::array<double, 4>& la, const std::array<double, 3>&, int cb,
                const std::array<double, 4>& lb, const std::array<double, 3>&, double w,
                int level) {
    rc.evaluate_in_cell(u, ca, la, va);
    rc.evaluate_in_cell(u, cb, lb, vb);
    double d2 = 0.0;
    for (int c = 0; c < comps; ++c) {
      const double d = va[c] - vb[c];
      d2 += d * d;
    }
    level_acc[std::size_t(level)] += w * d2;
  };
  PairEngine<decltype(fn)> engine(rc, spec, fn);
  engine.run();
  return finish_tail(level_acc, spec);
}

SeminormValue slobodetskij_difference(const DeRhamComplex& rc, const FormField& f,
                                      const Cochain& u, const SlobodetskijSpec& spec) {
  require(u.degree >= 0 && u.degree <= rc.dim(), "slobodetskij: degree out of range");
  require(u.values.size() == std::size_t(rc.dof_count(u.degree)), "slobodetskij: size mismatch");
  require(f.dim() == rc.dim() && f.degree() == u.degree,
          "slobodetskij_difference: field and cochain must match in dimension and degree");
  const int comps = form_component_count(rc.dim(), u.degree);
  std::vector<double> level_acc(std::size_t(spec.levels) + 1, 0.0);
  double va[4], vb[4], fa[4], fb[4];
  auto fn = [&](int ca, const std::array<double, 4>& la, const std::array<double, 3>& xa, int cb,
                const std::array<double, 4>& lb, const std::array<double, 3>& xb, double w,
                int level) {
    rc.evaluate_in_cell(u, ca, la, va);
    rc.evaluate_in_cell(u, cb, lb, vb);
    f(xa, fa);
    f(xb, fb);
    double d2 = 0.0;
    for (int c = 0; c < comps; ++c) {
      const double d = (fa[c] - va[c]) - (fb[c] - vb[c]);
      d2 += d * d;
    }
    level_acc[std::size_t(level)] += w * d2;
  };
  PairEngine<decltype(fn)> engine(rc, spec, fn);
  engine.run();
  return finish_tail(level_acc, spec);
}

SymmetricMatrix slobodetskij_gram(const DeRhamComplex& rc, int degree,
                                  const SlobodetskijSpec& spec) {
  require(degree >= 0 && degree <= rc.dim(), "slobodetskij: degree out of range");
  const PeriodicMesh& mesh = rc.mesh();
  const int n = rc.dim();
  const int comps = form_component_count(n, degree);
  const int faces = int(binomial(n + 1, degree + 1));
  SymmetricMatrix s{std::size_t(rc.dof_count(degree))};
  std::vector<double> va(std::size_t(faces) * std::size_t(comps), 0.0), vb(va);
  std::array<int, 8> ids{};
  std::array<std::array<double, 4>, 8> coef{};
  auto fn = [&](int ca, const std::array<double, 4>& la, const std::array<double, 3>&, int cb,
                const std::array<double, 4>& lb, const std::array<double, 3>&, double w, int) {
    rc.basis_values(degree, ca, la, va.data());
    rc.basis_values(degree, cb, lb, vb.data());
    int cnt = 0;
    for (int f = 0; f < faces; ++f) {
      ids[std::size_t(cnt)] = mesh.cell_face(ca, degree, f);
      for (int c = 0; c < comps; ++c)
        coef[std::size_t(cnt)][std::size_t(c)] = va[std::size_t(f * comps + c)];
      ++cnt;
    }
    for (int f = 0; f < faces; ++f) {
      const int g = mesh.cell_face(cb, degree, f);
      int at = -1;
      for (int t = 0; t < cnt; ++t)
        if (ids[std::size_t(t)] == g) {
          at = t;
          break;
        }
      if (at < 0) {
        at = cnt++;
        ids[std::size_t(at)] = g;
        coef[std::size_t(at)] = {0.0, 0.0, 0.0, 0.0};
      }
      for (int c = 0; c < comps; ++c)
        coef[std::size_t(at)][std::size_t(c)] -= vb[std::size_t(f * comps + c)];
    }
    for (int i = 0; i < cnt; ++i)
      for (int j = 0; j <= i; ++j) {
        double d = 0.0;
        for (int c = 0; c < comps; ++c)
          d += coef[std::size_t(i)][std::size_t(c)] * coef[std::size_t(j)][std::size_t(c)];
        const std::size_t gi = std::size_t(ids[std::size_t(i)]);
        const std::size_t gj = std::size_t(ids[std::size_t(j)]);
        if (gi >= gj)
          s.lower(gi, gj) += w * d;
        else
          s.lower(gj, gi) += w * d;
      }
  };
  PairEngine<decltype(fn)> engine(rc, spec, fn);
  engine.run();
  return s;
}

double sobolev_surrogate(const HodgeTools& tools, const Cochain& u, double sigma) {
  const DeRhamComplex& rc = tools.complex();
  require(u.degree >= 0 && u.degree <= rc.dim(), "sobolev_surrogate: degree out of range");
  require(u.values.size() == std::size_t(rc.dof_count(u.degree)), "sobolev_surrogate: size mismatch");
  const LaplacianSpectrum& sp = tools.laplacian_spectrum(u.degree);
  const Vector mu = rc.mass(u.degree).matvec(u.values);
  double acc = 0.0;
  for (std::size_t i = 0; i < sp.lambda.size(); ++i) {
    const double a = dot(sp.modes[i], mu);
    acc += std::pow(1.0 + std::max(sp.lambda[i], 0.0), sigma) * a * a;
  }
  return std::sqrt(std::max(acc, 0.0));
}

namespace {

GradedCochain random_graded(const DeRhamComplex& rc, SplitMix64& gen) {
  GradedCochain u;
  u.dim = rc.dim();
  for (int k = 0; k <= rc.dim(); ++k) {
    Vector v(std::size_t(rc.dof_count(k)), 0.0);
    for (double& x : v) x = gen.normal();
    u.values[std::size_t(k)] = std::move(v);
  }
  return u;
}

Cochain random_scalar(const DeRhamComplex& rc, SplitMix64& gen) {
  Cochain u{0, Vector(std::size_t(rc.dof_count(0)), 0.0)};
  for (double& x : u.values) x = gen.normal();
  // remove the constant component so ratio kernels cannot degenerate
  const Vector ones(u.values.size(), 1.0);
  const Vector mo = rc.mass(0).matvec(ones);
  const double mean = dot(u.values, mo) / dot(ones, mo);
  for (double& x : u.values) x -= mean;
  return u;
}

void finish_fit(SeminormReport& rep) {
  Vector w, r;
  for (const MeshRatioStats& m : rep.meshes) {
    w.push_back(m.width);
    r.push_back(m.max_ratio);
  }
  const LineFit fit = fit_loglog(w, r);
  rep.fitted_exponent = fit.slope;
  rep.r_squared = fit.r2;
}

}  // namespace

SeminormReport equivalence_experiment(const Lattice& base, const std::vector<int>& m_list,
                                      int samples, std::uint64_t seed) {
  require(samples > 0 && !m_list.empty(), "equivalence_experiment: empty request");
  SeminormReport rep;
  rep.id = "broken_vs_domain";
  rep.dim = base.dim;
  rep.samples = samples;
  rep.seed = seed;
  rep.target_exponent = 0.0;
  rep.notes =
      "sampled ratios bound the equivalence constants from inside; the jump term takes the "
      "full coefficient jump weighted by the plus-side cell diameter";
  const SplitMix64 master(seed);
  for (std::size_t mi = 0; mi < m_list.size(); ++mi) {
    Lattice lat = base;
    lat.subdivisions = m_list[mi];
    auto rc = DeRhamComplex::build(PeriodicMesh::build(lat));
    SplitMix64 mesh_gen = master.fork(mi);
    MeshRatioStats st;
    st.subdivisions = lat.subdivisions;
    st.width = rc->width();
    st.min_ratio = 0.0;
    st.max_ratio = 0.0;
    bool first = true;
    for (int j = 0; j < samples; ++j) {
      SplitMix64 gen = mesh_gen.fork(std::uint64_t(j));
      const GradedCochain u = random_graded(*rc, gen);
      const double den = domain_seminorm(*rc, u);
      if (den <= 0.0) continue;
      const double ratio = broken_h1_jump(*rc, u) / den;
      if (first || ratio < st.min_ratio) st.min_ratio = ratio;
      if (first || ratio > st.max_ratio) st.max_ratio = ratio;
      first = false;
    }
    rep.meshes.push_back(st);
  }
  finish_fit(rep);
  return rep;
}

std::vector<SeminormReport> inverse_inequality_suite(const Lattice& base,
                                                     const std::vector<int>& m_list, double s,
                                                     double s_prime, int samples,
                                                     std::uint64_t seed) {
  require(0.0 < s && s < s_prime && s_prime < 0.5, "inverse_inequality_suite: need 0 < s < s' < 1/2");
  require(samples > 0 && !m_list.empty(), "inverse_inequality_suite: empty request");

  auto make = [&](const char* id, double target) {
    SeminormReport rep;
    rep.id = id;
    rep.dim = base.dim;
    rep.s = s;
    rep.s_prime = s_prime;
    rep.samples = samples;
    rep.seed = seed;
    rep.target_exponent = target;
    rep.notes = "max ratios over random samples are sampling lower bounds of the constants";
    return rep;
  };
  std::vector<SeminormReport> reps;
  reps.push_back(make("fractional_vs_l2", -s));
  reps.push_back(make("fractional_pair", s - s_prime));
  reps.push_back(make("gradient_vs_fractional", s - 1.0));
  reps.push_back(make("interpolation_product", 0.0));
  reps.push_back(make("gradient_dual_bound", 0.0));

  const SplitMix64 master(seed);
  for (std::size_t mi = 0; mi < m_list.size(); ++mi) {
    Lattice lat = base;
    lat.subdivisions = m_list[mi];
    auto rc = DeRhamComplex::build(PeriodicMesh::build(lat));
    SlobodetskijSpec lo, hi;
    lo.s = s;
    hi.s = s_prime;
    const SymmetricMatrix gram_s = slobodetskij_gram(*rc, 0, lo);
    const SymmetricMatrix gram_sp = slobodetskij_gram(*rc, 0, hi);
    const SymmetricMatrix gram_ds = slobodetskij_gram(*rc, 1, lo);

    std::array<MeshRatioStats, 5> st;
    for (MeshRatioStats& x : st) {
      x.subdivisions = lat.subdivisions;
      x.width = rc->width();
    }
    bool first = true;
    SplitMix64 mesh_gen = master.fork(mi);
    for (int j = 0; j < samples; ++j) {
      SplitMix64 gen = mesh_gen.fork(std::uint64_t(j));
      const Cochain u = random_scalar(*rc, gen);
      const double l2 = std::sqrt(graded_norm2(*rc, 0, u.values));
      const double qs = std::sqrt(std::max(0.0, dot(u.values, matvec(gram_s, u.values))));
      const double qsp = std::sqrt(std::max(0.0, dot(u.values, matvec(gram_sp, u.values))));
      const Cochain du = rc->apply_d(u);
      const double ndu = std::sqrt(graded_norm2(*rc, 1, du.values));
      const double broken = broken_h1_jump(*rc, u);
      const double qds = std::sqrt(std::max(0.0, dot(du.values, matvec(gram_ds, du.values))));
      const Cochain z = weak_codifferential(*rc, du);
      const double dual = std::sqrt(graded_norm2(*rc, 0, z.values));
      if (l2 <= 0.0 || qs <= 0.0 || broken <= 0.0 || dual <= 0.0) continue;

      const double ratios[5] = {qs / l2, qsp / qs, ndu / qs,
                                qs / (std::pow(l2, 1.0 - s) * std::pow(broken, s)), qds / dual};
      for (int r = 0; r < 5; ++r) {
        MeshRatioStats& x = st[std::size_t(r)];
        if (first || ratios[r] < x.min_ratio) x.min_ratio = ratios[r];
        if (first || ratios[r] > x.max_ratio) x.max_ratio = ratios[r];
      }
      first = false;
    }
    for (int r = 0; r < 5; ++r) reps[std::size_t(r)].meshes.push_back(st[std::size_t(r)]);
  }
  for (SeminormReport& rep : reps) finish_fit(rep);
  return reps;
}

}  // namespace wdirac
