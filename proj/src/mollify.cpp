#include "wdirac/mollify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wdirac/fit.hpp"
#include "wdirac/norms.hpp"
#include "wdirac/quadrature.hpp"
#include "wdirac/spectra.hpp"

namespace wdirac {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= double(i);
  return f;
}

double surface_area(int dim) {
  // measure of the unit sphere bounding the ball in R^dim
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * M_PI;
    default: return 4.0 * M_PI;
  }
}

int gauss_points_for(int order) { return order / 2 + 1; }

}  // namespace

double Mollifier::profile(double r2) const {
  if (r2 >= 1.0) return 0.0;
  const double b = 1.0 - r2;
  double p = 1.0;
  for (int i = 0; i < q; ++i) p *= b;
  return normalization * p;
}

Mollifier make_mollifier(int dim, int q, double eps) {
  require(dim >= 1 && dim <= 3, "make_mollifier: dimension out of range");
  require(q >= 1 && q <= 20, "make_mollifier: exponent out of range");
  require(eps > 0.0 && eps <= 0.49,
          "make_mollifier: radius fraction above 0.49, the ball must stay inside the "
          "neighbor patch of a cell");
  Mollifier mol;
  mol.dim = dim;
  mol.q = q;
  mol.eps = eps;
  // closed form of the ball integral of (1 - |x|^2)^q
  mol.normalization =
      std::tgamma(double(q) + 1.0 + 0.5 * dim) /
      (std::pow(M_PI, 0.5 * dim) * std::tgamma(double(q) + 1.0));

  // radial cross-check, exact for the polynomial integrand
  const QuadRule g = gauss_legendre(q + 2);
  double mass = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = g.points[i][0];
    mass += g.weights[i] * mol.profile(t * t) * std::pow(t, double(dim - 1));
  }
  mass *= surface_area(dim);
  if (std::fabs(mass - 1.0) > 1e-10)
    throw NumericalFailure("make_mollifier: normalization failed the unit-mass check");
  return mol;
}

double mollifier_mass(const Mollifier& mol, int quad_order) {
  require(quad_order >= 1 && quad_order <= 40, "mollifier_mass: order out of range");
  if (mol.dim == 2) {
    const QuadRule dr = disc_rule(quad_order);
    double mass = 0.0;
    for (std::size_t i = 0; i < dr.size(); ++i) {
      const double px = dr.points[i][0], py = dr.points[i][1];
      mass += dr.weights[i] * mol.profile(px * px + py * py);
    }
    return mass;
  }
  // odd dimensions reduce to the radial integral against the sphere measure
  const QuadRule g = gauss_legendre(gauss_points_for(quad_order) + mol.q + 1);
  double mass = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = g.points[i][0];
    mass += g.weights[i] * mol.profile(t * t) * std::pow(t, double(mol.dim - 1));
  }
  return mass * surface_area(mol.dim);
}

void convolve(const DeRhamComplex& rc, const Mollifier& mol, const FormField& u,
              const std::array<double, 3>& x, double* out, int quad_order) {
  const int n = rc.dim();
  require(mol.dim == n && u.dim() == n, "convolve: dimension mismatch");
  require(n <= 2, "convolve: dimension 3 smoothing disabled, the ball quadrature cost is cubic");
  require(quad_order >= 1 && quad_order <= 20, "convolve: quadrature order out of range");
  require(mol.eps <= 0.49, "convolve: radius fraction above 0.49");
  const double r = mol.eps * rc.mesh().min_cell_width();
  const int comps = u.components();
  for (int c = 0; c < comps; ++c) out[c] = 0.0;
  double val[4];

  if (n == 1) {
    // integrate in the scaled window variable, where the bump's derivatives
    // stay O(1); split at the preimages of the lattice breaks so piecewise
    // affine inputs are exact. One Gauss point beyond half the order covers
    // the bump against the local curvature of smooth inputs.
    const double h = rc.mesh().lattice().cell_width(0);
    const double lo = x[0] - r, hi = x[0] + r;
    double cuts[8];
    int nc = 0;
    cuts[nc++] = -1.0;
    for (int j = int(std::ceil(lo / h)) - 1; double(j) * h < hi; ++j) {
      const double s = (x[0] - double(j) * h) / r;
      if (s > -1.0 && s < 1.0 && nc < 7) {
        int at = nc++;
        while (at > 1 && cuts[at - 1] > s) {
          cuts[at] = cuts[at - 1];
          --at;
        }
        cuts[at] = s;
      }
    }
    cuts[nc++] = 1.0;
    const QuadRule g = gauss_legendre(quad_order / 2 + 2);
    for (int seg = 0; seg + 1 < nc; ++seg) {
      const double a = cuts[seg], b = cuts[seg + 1];
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double s = a + (b - a) * g.points[i][0];
        const double w = (b - a) * g.weights[i] * mol.profile(s * s);
        if (w == 0.0) continue;
        u({x[0] - r * s, 0.0, 0.0}, val);
        for (int c = 0; c < comps; ++c) out[c] += w * val[c];
      }
    }
    return;
  }

  const QuadRule dr = disc_rule(quad_order);
  for (std::size_t i = 0; i < dr.size(); ++i) {
    const double px = dr.points[i][0], py = dr.points[i][1];
    const double w = dr.weights[i] * mol.profile(px * px + py * py);
    u({x[0] - r * px, x[1] - r * py, 0.0}, val);
    for (int c = 0; c < comps; ++c) out[c] += w * val[c];
  }
}

FormField convolved(std::shared_ptr<const DeRhamComplex> rc, const Mollifier& mol,
                    const FormField& u, int quad_order) {
  require(rc != nullptr, "convolved: null complex");
  require(mol.dim == rc->dim() && u.dim() == rc->dim(), "convolved: dimension mismatch");
  const int degree = u.degree();
  auto eval = [rc, mol, u, quad_order](const std::array<double, 3>& x, double* out) {
    convolve(*rc, mol, u, x, out, quad_order);
  };
  return FormField(rc->dim(), degree, std::move(eval));
}

FormField whitney_field(std::shared_ptr<const DeRhamComplex> rc, Cochain u) {
  require(rc != nullptr, "whitney_field: null complex");
  require(u.degree >= 0 && u.degree <= rc->dim(), "whitney_field: degree out of range");
  require(u.values.size() == std::size_t(rc->dof_count(u.degree)),
          "whitney_field: size mismatch");
  const int dim = rc->dim(), degree = u.degree;
  auto eval = [rc, uu = std::move(u)](const std::array<double, 3>& x, double* out) {
    rc->evaluate(uu, x, out);
  };
  return FormField(dim, degree, std::move(eval));
}

namespace {

// Dof integration for smoothed fields on the circle. The smoothed Whitney
// representatives are piecewise polynomial with breaks at the lattice points
// and their +-r offsets, so an edge rule split there is exact once the Gauss
// count covers the polynomial degree; smooth inputs only gain accuracy.
Cochain interpolate_smoothed_1d(const DeRhamComplex& rc, double r, const FormField& g,
                                int quad_order) {
  const PeriodicMesh& mesh = rc.mesh();
  const double h = mesh.lattice().cell_width(0);
  const int k = g.degree();
  Cochain out{k, Vector(std::size_t(rc.dof_count(k)), 0.0)};
  if (k == 0) {
    double v = 0.0;
    for (int i = 0; i < rc.dof_count(0); ++i) {
      g(mesh.vertex_coord(i), &v);
      out.values[std::size_t(i)] = v;
    }
    return out;
  }
  const QuadRule gs = gauss_legendre(gauss_points_for(quad_order) + 1);
  for (int e = 0; e < rc.dof_count(1); ++e) {
    const double* q = rc.mesh().coords(1, e);
    const double lo = std::min(q[0], q[1]), hi = std::max(q[0], q[1]);
    const double sign = q[1] >= q[0] ? 1.0 : -1.0;
    double cuts[32];
    int nc = 0;
    cuts[nc++] = lo;
    const int j0 = int(std::floor(lo / h)) - 1, j1 = int(std::ceil(hi / h)) + 1;
    for (int j = j0; j <= j1; ++j)
      for (double c : {double(j) * h - r, double(j) * h, double(j) * h + r})
        if (c > lo && c < hi && nc < 31) {
          int at = nc++;
          while (at > 1 && cuts[at - 1] > c) {
            cuts[at] = cuts[at - 1];
            --at;
          }
          cuts[at] = c;
        }
    cuts[nc++] = hi;
    double acc = 0.0, v = 0.0;
    for (int seg = 0; seg + 1 < nc; ++seg) {
      const double a = cuts[seg], b = cuts[seg + 1];
      if (b - a < 1e-14 * h) continue;
      for (std::size_t i = 0; i < gs.size(); ++i) {
        g({a + (b - a) * gs.points[i][0], 0.0, 0.0}, &v);
        acc += (b - a) * gs.weights[i] * v;
      }
    }
    out.values[std::size_t(e)] = sign * acc;
  }
  return out;
}

Cochain smoothed_dofs(const DeRhamComplex& rc, const Mollifier& mol, const FormField& f,
                      int quad_order) {
  const FormField g = convolved(rc.shared(), mol, f, quad_order);
  if (rc.dim() == 1)
    return interpolate_smoothed_1d(rc, mol.eps * rc.mesh().min_cell_width(), g, quad_order);
  return rc.interpolate(g, quad_order);
}

}  // namespace

const Matrix& SmoothedProjector::restriction(int degree) const {
  require(degree >= 0 && degree <= rc_->dim(), "restriction: degree out of range");
  return j_[std::size_t(degree)];
}

double SmoothedProjector::condition(int degree) const {
  require(degree >= 0 && degree <= rc_->dim(), "condition: degree out of range");
  return cond_[std::size_t(degree)];
}

Cochain SmoothedProjector::smooth_interpolate(const FormField& f) const {
  require(f.dim() == rc_->dim(), "smooth_interpolate: dimension mismatch");
  return smoothed_dofs(*rc_, mol_, f, quad_order_);
}

Cochain SmoothedProjector::project(const FormField& f) const {
  Cochain j = smooth_interpolate(f);
  j.values = lu_[std::size_t(j.degree)].solve(std::move(j.values));
  return j;
}

Cochain SmoothedProjector::project(const Cochain& u) const {
  require(u.degree >= 0 && u.degree <= rc_->dim(), "project: degree out of range");
  require(u.values.size() == std::size_t(rc_->dof_count(u.degree)), "project: size mismatch");
  Vector y = matvec(j_[std::size_t(u.degree)], u.values);
  return Cochain{u.degree, lu_[std::size_t(u.degree)].solve(std::move(y))};
}

SmoothedProjector build_projector(std::shared_ptr<const DeRhamComplex> rc, const Mollifier& mol,
                                  int quad_order) {
  require(rc != nullptr, "build_projector: null complex");
  require(rc->dim() <= 2, "build_projector: dimension 3 smoothing disabled (cost)");
  require(mol.dim == rc->dim(), "build_projector: dimension mismatch");
  require(quad_order >= 3 && quad_order <= 15, "build_projector: quadrature order out of range");
  SmoothedProjector proj;
  proj.rc_ = rc;
  proj.mol_ = mol;
  proj.quad_order_ = quad_order;
  proj.radius_ = mol.eps * rc->mesh().min_cell_width();
  const int n = rc->dim();
  for (int k = 0; k <= n; ++k) {
    const int nk = rc->dof_count(k);
    Matrix jm{std::size_t(nk), std::size_t(nk)};
    Cochain basis{k, Vector(std::size_t(nk), 0.0)};
    for (int c = 0; c < nk; ++c) {
      basis.values[std::size_t(c)] = 1.0;
      const Cochain col = smoothed_dofs(*rc, mol, whitney_field(rc, basis), quad_order);
      for (int i = 0; i < nk; ++i) jm(std::size_t(i), std::size_t(c)) = col.values[std::size_t(i)];
      basis.values[std::size_t(c)] = 0.0;
    }
    const SvdResult svd = jacobi_svd(jm);
    const double smin = svd.sigma.back();
    const double cond = smin > 0.0 ? svd.sigma.front() / smin
                                   : std::numeric_limits<double>::infinity();
    if (!(cond < 1e6))
      throw NumericalFailure(
          "build_projector: restriction condition number above 1e6, shrink the smoothing radius");
    proj.cond_.push_back(cond);
    proj.lu_.push_back(lu_factor(jm));
    proj.j_.push_back(std::move(jm));
  }
  return proj;
}

double commutation_residual(const SmoothedProjector& proj, const FormField& u,
                            const FormField& du) {
  const DeRhamComplex& rc = proj.complex();
  const int k = u.degree();
  require(k >= 0 && k < rc.dim(), "commutation_residual: degree out of range");
  require(du.degree() == k + 1 && du.dim() == u.dim() && u.dim() == rc.dim(),
          "commutation_residual: derivative field must be one degree up");
  const Cochain dpu = rc.apply_d(proj.project(u));
  const Cochain pdu = proj.project(du);
  Cochain diff = dpu;
  for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= pdu.values[i];
  const double scale = rc.l2_norm(pdu);
  const double res = rc.l2_norm(diff);
  return scale > 0.0 ? res / scale : res;
}

namespace {

// symmetrized energy a^T M b over columns, for pencil eigenproblems
SymmetricMatrix column_energy(const DeRhamComplex& rc, int k, const std::vector<Vector>& cols) {
  const std::size_t nk = cols.size();
  SymmetricMatrix g{nk};
  for (std::size_t j = 0; j < nk; ++j) {
    const Vector mj = rc.mass(k).matvec(cols[j]);
    for (std::size_t i = j; i < nk; ++i) g.lower(i, j) = dot(cols[i], mj);
  }
  return g;
}

std::vector<Vector> matrix_columns(const Matrix& a) {
  std::vector<Vector> cols;
  cols.resize(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) cols[j] = a.col(j);
  return cols;
}

}  // namespace

std::vector<StabilityReport> stability_experiment(const Lattice& base,
                                                  const std::vector<int>& m_list,
                                                  const Mollifier& mol, int quad_order) {
  require(!m_list.empty(), "stability_experiment: empty mesh list");
  std::vector<StabilityReport> out;
  for (int m : m_list) {
    Lattice lat = base;
    lat.subdivisions = m;
    auto rc = DeRhamComplex::build(PeriodicMesh::build(lat));
    const SmoothedProjector proj = build_projector(rc, mol, quad_order);
    StabilityReport rep;
    rep.subdivisions = m;
    rep.width = rc->width();
    for (int k = 0; k <= rc->dim(); ++k) {
      rep.condition.push_back(proj.condition(k));
      const EigenSolution je = generalized_symmetric_eig(
          column_energy(*rc, k, matrix_columns(proj.restriction(k))), rc->mass_dense(k));
      const double lo = std::sqrt(std::max(je.eigenvalues.front(), 0.0));
      const double hi = std::sqrt(std::max(je.eigenvalues.back(), 0.0));
      rep.equiv_min.push_back(lo);
      rep.equiv_max.push_back(hi);
      if (!(lo > 0.0))
        throw NumericalFailure("stability_experiment: smoothed restriction lost injectivity");
      // the projector is the identity on its own coefficients, so the mesh
      // dependent factor of its L2 bound is the norm of the inverse
      // restriction, the reciprocal of the lower equivalence constant
      rep.l2_norm.push_back(1.0 / lo);
    }
    out.push_back(std::move(rep));
  }
  return out;
}

namespace {

double l2_field_error(const DeRhamComplex& rc, const FormField& f, const Cochain& u,
                      int quad_order) {
  const PeriodicMesh& mesh = rc.mesh();
  const int n = mesh.dim();
  const int comps = form_component_count(n, u.degree);
  const QuadRule rule = simplex_rule(n, quad_order);
  const double fact = factorial(n);
  double acc = 0.0;
  double a[4], b[4];
  for (int cell = 0; cell < mesh.count(n); ++cell) {
    const double* qv = mesh.coords(n, cell);
    for (std::size_t p = 0; p < rule.size(); ++p) {
      std::array<double, 4> lam{0.0, 0.0, 0.0, 0.0};
      lam[0] = 1.0;
      for (int j = 0; j < n; ++j) {
        lam[std::size_t(j) + 1] = rule.points[p][std::size_t(j)];
        lam[0] -= lam[std::size_t(j) + 1];
      }
      std::array<double, 3> pos{0.0, 0.0, 0.0};
      for (int v = 0; v <= n; ++v)
        for (int ax = 0; ax < n; ++ax)
          pos[std::size_t(ax)] += lam[std::size_t(v)] * qv[v * n + ax];
      rc.evaluate_in_cell(u, cell, lam, a);
      f(pos, b);
      double d2 = 0.0;
      for (int c = 0; c < comps; ++c) {
        const double d = a[c] - b[c];
        d2 += d * d;
      }
      acc += fact * mesh.measure(n, cell) * rule.weights[p] * d2;
    }
  }
  return std::sqrt(std::max(acc, 0.0));
}

}  // namespace

ProjectorRates rate_experiment(const Lattice& base, const std::vector<int>& m_list,
                               const FormField& u, const Mollifier& mol, int quad_order,
                               double s_prime) {
  require(m_list.size() >= 3, "rate_experiment: need at least three meshes for a fit");
  require(u.dim() == base.dim && mol.dim == base.dim, "rate_experiment: dimension mismatch");
  ProjectorRates rates;
  rates.fractional_s = s_prime;
  const bool fractional = base.dim == 1 && u.degree() == 0;
  for (int m : m_list) {
    Lattice lat = base;
    lat.subdivisions = m;
    auto rc = DeRhamComplex::build(PeriodicMesh::build(lat));
    const SmoothedProjector proj = build_projector(rc, mol, quad_order);
    const Cochain pu = proj.project(u);
    const Cochain ju = proj.smooth_interpolate(u);
    rates.widths.push_back(rc->width());
    rates.projector_error.push_back(l2_field_error(*rc, u, pu, quad_order + 3));
    rates.smoothed_interp_error.push_back(l2_field_error(*rc, u, ju, quad_order + 3));
    if (fractional) {
      SlobodetskijSpec spec;
      spec.s = s_prime;
      rates.fractional_error.push_back(slobodetskij_difference(*rc, u, pu, spec).value);
    }
  }
  rates.projector_order = fit_loglog(rates.widths, rates.projector_error).slope;
  rates.smoothed_interp_order = fit_loglog(rates.widths, rates.smoothed_interp_error).slope;
  if (fractional)
    rates.fractional_order = fit_loglog(rates.widths, rates.fractional_error).slope;
  return rates;
}

}  // namespace wdirac
