#include "wdirac/hodge.hpp"

#include <algorithm>
#include <cmath>

#include "wdirac/rng.hpp"
#include "wdirac/spectra.hpp"

namespace wdirac {

namespace {

double m_norm(const DeRhamComplex& rc, int k, const Vector& x) {
  if (x.empty()) return 0.0;
  return std::sqrt(std::max(0.0, dot(x, rc.mass(k).matvec(x))));
}

}  // namespace

HodgeTools::HodgeTools(std::shared_ptr<const DeRhamComplex> rc) : rc_(std::move(rc)) {
  require(rc_ != nullptr, "hodge: null complex");
}

const UpSpectrum& HodgeTools::up_locked(int k) const {
  require(k >= 0 && k <= rc_->dim(), "hodge: degree out of range");
  auto& slot = up_[std::size_t(k)];
  if (slot) return *slot;

  const int nk = rc_->dof_count(k);
  SymmetricMatrix a{std::size_t(nk)};
  if (k < rc_->dim()) {
    // A = d^T M_{k+1} d assembled column by column through sparse products
    const SparseMatrix& d = rc_->coboundary_real(k);
    const SparseMatrix& m1 = rc_->mass(k + 1);
    Vector ej(std::size_t(nk), 0.0);
    for (int j = 0; j < nk; ++j) {
      ej[std::size_t(j)] = 1.0;
      const Vector col = d.tmatvec(m1.matvec(d.matvec(ej)));
      for (int i = j; i < nk; ++i) a.lower(std::size_t(i), std::size_t(j)) = col[std::size_t(i)];
      ej[std::size_t(j)] = 0.0;
    }
  }

  EigenSolution es = generalized_symmetric_eig(a, rc_->mass_dense(k));
  auto spec = std::make_unique<UpSpectrum>();
  spec->mu = std::move(es.eigenvalues);
  spec->modes = std::move(es.eigenvectors);
  const double scale =
      spec->mu.empty() ? 0.0 : std::max(std::fabs(spec->mu.front()), std::fabs(spec->mu.back()));
  spec->zero_threshold = 1e-10 * std::max(scale, 1.0);
  int kd = 0;
  while (kd < nk && std::fabs(spec->mu[std::size_t(kd)]) < spec->zero_threshold) ++kd;
  spec->kernel_dim = kd;
  for (int i = kd; i < nk; ++i)
    if (spec->mu[std::size_t(i)] < 1e3 * spec->zero_threshold)
      throw NumericalFailure("hodge: no spectral gap above the kernel of d");
  slot = std::move(spec);
  return *slot;
}

const std::vector<Vector>& HodgeTools::exact_locked(int k) const {
  require(k >= 0 && k <= rc_->dim(), "hodge: degree out of range");
  auto& slot = exact_[std::size_t(k)];
  if (slot) return *slot;

  auto basis = std::make_unique<std::vector<Vector>>();
  if (k >= 1) {
    const UpSpectrum& up = up_locked(k - 1);
    const SparseMatrix& d = rc_->coboundary_real(k - 1);
    const int nlow = rc_->dof_count(k - 1);
    for (int i = up.kernel_dim; i < nlow; ++i) {
      Vector b = d.matvec(up.modes[std::size_t(i)]);
      const double inv = 1.0 / std::sqrt(up.mu[std::size_t(i)]);
      for (double& x : b) x *= inv;
      basis->push_back(std::move(b));
    }
  }
  slot = std::move(basis);
  return *slot;
}

const HarmonicBasis& HodgeTools::harmonic_locked(int k) const {
  auto& slot = harmonic_[std::size_t(k)];
  if (slot) return *slot;

  const UpSpectrum& up = up_locked(k);
  const std::vector<Vector>& ex = exact_locked(k);
  const int z = up.kernel_dim;
  auto hb = std::make_unique<HarmonicBasis>();
  hb->degree = k;
  if (ex.empty()) {
    hb->vectors.assign(up.modes.begin(), up.modes.begin() + z);
  } else {
    // coordinates of the exact space inside the kernel basis; the null space
    // of this map is the harmonic space
    const int e = int(ex.size());
    Matrix c{std::size_t(e), std::size_t(z)};
    const SparseMatrix& m = rc_->mass(k);
    for (int i = 0; i < e; ++i) {
      const Vector t = m.matvec(ex[std::size_t(i)]);
      for (int j = 0; j < z; ++j)
        c(std::size_t(i), std::size_t(j)) = dot(t, up.modes[std::size_t(j)]);
    }
    const SvdResult svd = jacobi_svd(c);
    const double smax = svd.sigma.empty() ? 0.0 : svd.sigma.front();
    std::size_t rank = 0;
    while (rank < svd.sigma.size() && svd.sigma[rank] > 1e-10 * smax) ++rank;
    for (std::size_t j = rank; j < std::size_t(z); ++j) {
      Vector g(std::size_t(rc_->dof_count(k)), 0.0);
      for (int a = 0; a < z; ++a)
        axpy_inplace(svd.v(std::size_t(a), j), up.modes[std::size_t(a)], g);
      hb->vectors.push_back(std::move(g));
    }
  }
  if (hb->dimension() != int(binomial(rc_->dim(), k)))
    throw NumericalFailure("hodge: harmonic dimension disagrees with binomial(n,k)");
  slot = std::move(hb);
  return *slot;
}

const UpSpectrum& HodgeTools::up_spectrum(int k) const {
  std::lock_guard<std::mutex> guard(mutex_);
  return up_locked(k);
}

const std::vector<Vector>& HodgeTools::exact_basis(int k) const {
  std::lock_guard<std::mutex> guard(mutex_);
  return exact_locked(k);
}

const HarmonicBasis& HodgeTools::harmonic(int k) const {
  std::lock_guard<std::mutex> guard(mutex_);
  return harmonic_locked(k);
}

const LaplacianSpectrum& HodgeTools::laplacian_spectrum(int k) const {
  std::lock_guard<std::mutex> guard(mutex_);
  auto& slot = laplacian_[std::size_t(k)];
  if (slot) return *slot;

  const UpSpectrum& up = up_locked(k);
  const std::vector<Vector>& ex = exact_locked(k);
  const HarmonicBasis& hb = harmonic_locked(k);
  std::vector<std::pair<double, const Vector*>> entries;
  for (const Vector& g : hb.vectors) entries.emplace_back(0.0, &g);
  if (k >= 1) {
    const UpSpectrum& low = up_locked(k - 1);
    for (std::size_t i = 0; i < ex.size(); ++i)
      entries.emplace_back(low.mu[std::size_t(low.kernel_dim) + i], &ex[i]);
  }
  for (int i = up.kernel_dim; i < rc_->dof_count(k); ++i)
    entries.emplace_back(up.mu[std::size_t(i)], &up.modes[std::size_t(i)]);
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  require(int(entries.size()) == rc_->dof_count(k), "hodge: laplacian basis count mismatch");

  auto ls = std::make_unique<LaplacianSpectrum>();
  for (const auto& [lambda, mode] : entries) {
    ls->lambda.push_back(lambda);
    ls->modes.push_back(*mode);
  }
  slot = std::move(ls);
  return *slot;
}

Cochain HodgeTools::codifferential(const Cochain& u) const { return weak_codifferential(*rc_, u); }

HodgeDecomposition HodgeTools::decompose(const Cochain& u) const {
  std::lock_guard<std::mutex> guard(mutex_);
  const int k = u.degree;
  require(k >= 0 && k <= rc_->dim(), "hodge: degree out of range");
  const int nk = rc_->dof_count(k);
  require(int(u.values.size()) == nk, "hodge: cochain size mismatch");

  const std::vector<Vector>& ex = exact_locked(k);
  const HarmonicBasis& hb = harmonic_locked(k);
  const Vector t = rc_->mass(k).matvec(u.values);

  HodgeDecomposition out;
  out.degree = k;
  Vector dw(std::size_t(nk), 0.0);
  Vector w;
  if (k >= 1) {
    const UpSpectrum& low = up_locked(k - 1);
    w.assign(std::size_t(rc_->dof_count(k - 1)), 0.0);
    for (std::size_t i = 0; i < ex.size(); ++i) {
      const double c = dot(ex[i], t);
      axpy_inplace(c, ex[i], dw);
      const std::size_t mode = std::size_t(low.kernel_dim) + i;
      axpy_inplace(c / std::sqrt(low.mu[mode]), low.modes[mode], w);
    }
  }
  Vector g(std::size_t(nk), 0.0);
  for (const Vector& z : hb.vectors) axpy_inplace(dot(z, t), z, g);
  Vector v = u.values;
  axpy_inplace(-1.0, dw, v);
  axpy_inplace(-1.0, g, v);

  const double nu = m_norm(*rc_, k, u.values);
  const double scale2 = std::max(nu * nu, 1e-300);

  Vector res = u.values;
  axpy_inplace(-1.0, dw, res);
  axpy_inplace(-1.0, v, res);
  axpy_inplace(-1.0, g, res);
  out.identity_residual = m_norm(*rc_, k, res) / std::max(nu, 1e-300);

  const Vector mdw = rc_->mass(k).matvec(dw);
  const Vector mv = rc_->mass(k).matvec(v);
  out.max_cross_inner =
      std::max({std::fabs(dot(mdw, v)), std::fabs(dot(mdw, g)), std::fabs(dot(mv, g))}) / scale2;

  double ker2 = 0.0;
  for (const Vector& b : ex) ker2 += dot(b, mv) * dot(b, mv);
  for (const Vector& z : hb.vectors) ker2 += dot(z, mv) * dot(z, mv);
  out.coexact_kernel_residual = std::sqrt(ker2) / std::max(nu, 1e-300);
  out.stability_ratio = nu > 1e-300 && k >= 1 ? m_norm(*rc_, k - 1, w) / nu : 0.0;

  out.potential = Cochain{k >= 1 ? k - 1 : 0, std::move(w)};
  out.exact = Cochain{k, std::move(dw)};
  out.coexact = Cochain{k, std::move(v)};
  out.harmonic = Cochain{k, std::move(g)};
  return out;
}

Cochain HodgeTools::kernel_projection(const Cochain& u) const {
  std::lock_guard<std::mutex> guard(mutex_);
  const int k = u.degree;
  require(k >= 0 && k <= rc_->dim(), "hodge: degree out of range");
  const std::vector<Vector>& ex = exact_locked(k);
  const HarmonicBasis& hb = harmonic_locked(k);
  const Vector t = rc_->mass(k).matvec(u.values);
  Vector p(u.values.size(), 0.0);
  for (const Vector& b : ex) axpy_inplace(dot(b, t), b, p);
  for (const Vector& z : hb.vectors) axpy_inplace(dot(z, t), z, p);
  return Cochain{k, std::move(p)};
}

Cochain HodgeTools::p_h(const Cochain& u) const {
  std::lock_guard<std::mutex> guard(mutex_);
  const int k = u.degree;
  require(k >= 0 && k <= rc_->dim(), "hodge: degree out of range");
  Cochain out{k, Vector(u.values.size(), 0.0)};
  if (k == rc_->dim()) return out;  // d vanishes, so the projection is zero

  const UpSpectrum& up = up_locked(k);
  const std::vector<Vector>& exup = exact_locked(k + 1);
  const Cochain du = rc_->apply_d(u);
  const Vector t = rc_->mass(k + 1).matvec(du.values);
  for (std::size_t i = 0; i < exup.size(); ++i) {
    const std::size_t mode = std::size_t(up.kernel_dim) + i;
    const double a = dot(exup[i], t) / std::sqrt(up.mu[mode]);
    axpy_inplace(a, up.modes[mode], out.values);
  }
  return out;
}

Matrix HodgeTools::nonharmonic_graded_basis() const {
  std::lock_guard<std::mutex> guard(mutex_);
  const int n = rc_->dim();
  std::size_t cols = 0;
  for (int k = 0; k <= n; ++k) {
    cols += exact_locked(k).size();
    cols += std::size_t(rc_->dof_count(k) - up_locked(k).kernel_dim);
  }
  Matrix b(std::size_t(rc_->total_dof_count()), cols);
  std::size_t col = 0;
  for (int k = 0; k <= n; ++k) {
    const std::size_t off = std::size_t(rc_->graded_offset(k));
    for (const Vector& v : exact_locked(k)) {
      for (std::size_t i = 0; i < v.size(); ++i) b(off + i, col) = v[i];
      ++col;
    }
    const UpSpectrum& up = up_locked(k);
    for (int i = up.kernel_dim; i < rc_->dof_count(k); ++i) {
      const Vector& v = up.modes[std::size_t(i)];
      for (std::size_t j = 0; j < v.size(); ++j) b(off + j, col) = v[j];
      ++col;
    }
  }
  return b;
}

Cochain weak_codifferential(const DeRhamComplex& rc, const Cochain& u) {
  const int k = u.degree;
  require(k >= 1 && k <= rc.dim(), "weak_codifferential: degree must be between 1 and dim");
  require(int(u.values.size()) == rc.dof_count(k), "weak_codifferential: cochain size mismatch");
  const Vector rhs = rc.coboundary_real(k - 1).tmatvec(rc.mass(k).matvec(u.values));
  const SparseMatrix& m = rc.mass(k - 1);
  Cochain y{k - 1, Vector(std::size_t(rc.dof_count(k - 1)), 0.0)};
  cg_solve([&m](const Vector& x, Vector& out) { out = m.matvec(x); }, rhs, y.values, 1e-13,
           2000);
  return y;
}

HarmonicBasis harmonic_basis(const DeRhamComplex& rc, int k) {
  return HodgeTools(rc.shared()).harmonic(k);
}

HodgeDecomposition hodge_decompose(const DeRhamComplex& rc, const Cochain& u) {
  return HodgeTools(rc.shared()).decompose(u);
}

Cochain p_h_projector(const DeRhamComplex& rc, const Cochain& u) {
  return HodgeTools(rc.shared()).p_h(u);
}

Cochain p_h_projector(const DeRhamComplex& rc, const FormField& field, int quad_order) {
  return p_h_projector(rc, rc.interpolate(field, quad_order));
}

std::vector<Vector> constant_forms_basis(const DeRhamComplex& rc, int k) {
  const int comps = form_component_count(rc.dim(), k);
  const SparseMatrix& m = rc.mass(k);
  std::vector<Vector> out;
  for (int c = 0; c < comps; ++c) {
    std::vector<double> unit(std::size_t(comps), 0.0);
    unit[std::size_t(c)] = 1.0;
    Cochain ch = rc.interpolate(constant_form(rc.dim(), k, unit), 3);
    Vector x = std::move(ch.values);
    for (int pass = 0; pass < 2; ++pass) {
      const Vector t = m.matvec(x);
      for (const Vector& prev : out) axpy_inplace(-dot(prev, t), prev, x);
    }
    const double nx = m_norm(rc, k, x);
    if (!(nx > 1e-12)) throw NumericalFailure("hodge: constant forms are M-degenerate");
    for (double& v : x) v /= nx;
    out.push_back(std::move(x));
  }
  return out;
}

GapReport gap_measurement(const DeRhamComplex& rc, int degree, int samples, std::uint64_t seed) {
  require(degree >= 0 && degree <= rc.dim(), "gap: degree out of range");
  require(samples >= 1, "gap: need at least one sample");
  GapReport rep;
  rep.degree = degree;
  if (degree == rc.dim()) return rep;  // complement of ker d is trivial here

  Lattice fine_lat = rc.mesh().lattice();
  fine_lat.subdivisions *= 2;
  auto fine = DeRhamComplex::build(PeriodicMesh::build(fine_lat));

  HodgeTools coarse(rc.shared());
  HodgeTools refined(fine);
  // the harmonic spaces of the flat torus are spanned by the constant forms
  // (hard-checked elsewhere), which avoids the large eigensolve at `degree`
  const std::vector<Vector>& exc = coarse.exact_basis(degree);
  const std::vector<Vector> gc = constant_forms_basis(rc, degree);
  const std::vector<Vector>& exf = refined.exact_basis(degree);
  const std::vector<Vector> gf = constant_forms_basis(*fine, degree);

  const int nk = rc.dof_count(degree);
  const SparseMatrix& m = rc.mass(degree);
  const SparseMatrix& mf = fine->mass(degree);
  SplitMix64 rng(seed);
  double sum = 0.0;
  for (int s = 0; s < samples; ++s) {
    SplitMix64 sub = rng.fork(std::uint64_t(s));
    Cochain u{degree, Vector(std::size_t(nk))};
    for (double& x : u.values) x = sub.normal();
    for (int pass = 0; pass < 2; ++pass) {  // project out ker d, twice for drift
      const Vector t = m.matvec(u.values);
      for (const Vector& b : exc) axpy_inplace(-dot(b, t), b, u.values);
      for (const Vector& z : gc) axpy_inplace(-dot(z, t), z, u.values);
    }
    const Cochain du = rc.apply_d(u);
    const double ndu = m_norm(rc, degree + 1, du.values);
    const double nu = m_norm(rc, degree, u.values);
    if (!(ndu > 1e-12 * std::max(nu, 1e-300))) continue;

    const FormField field(rc.dim(), degree,
                          [rcp = rc.shared(), u](const std::array<double, 3>& x, double* out) {
                            rcp->evaluate(u, x, out);
                          });
    const Cochain uf = fine->interpolate(field, 5);
    const double nuf = m_norm(*fine, degree, uf.values);
    if (nu > 1e-300) rep.embed_defect = std::max(rep.embed_defect, std::fabs(nuf - nu) / nu);

    const Vector tf = mf.matvec(uf.values);
    double ker2 = 0.0;
    for (const Vector& b : exf) ker2 += dot(b, tf) * dot(b, tf);
    for (const Vector& z : gf) ker2 += dot(z, tf) * dot(z, tf);
    const double ratio = std::sqrt(ker2) / ndu;
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    sum += ratio;
    rep.samples_used++;
  }
  rep.mean_ratio = rep.samples_used > 0 ? sum / rep.samples_used : 0.0;
  return rep;
}

}  // namespace wdirac
