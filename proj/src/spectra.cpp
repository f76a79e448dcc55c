#include "wdirac/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wdirac/simd.hpp"

namespace wdirac {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Householder reduction to tridiagonal form, transform accumulated in z
// (row-major): z^T a z = tridiag(d, e) with e[i] coupling rows i-1 and i.
void tridiagonalize(const SymmetricMatrix& a, Vector& d, Vector& e, Matrix& z) {
  const std::size_t n = a.size();
  z = a.full();
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (std::size_t i = n - 1; i >= 1; --i) {
    const std::size_t l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (std::size_t k = 0; k <= l; ++k) scale += std::fabs(z(i, k));
      if (scale == 0.0) {
        e[i] = z(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          z(i, k) /= scale;
          h += z(i, k) * z(i, k);
        }
        double f = z(i, l);
        const double g0 = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g0;
        h -= f * g0;
        z(i, l) = f - g0;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          z(j, i) = z(i, j) / h;
          double g = simd::dot(z.row(j), z.row(i), j + 1);
          for (std::size_t k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
          e[j] = g / h;
          f += e[j] * z(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = z(i, j);
          const double gj = e[j] - hh * f;
          e[j] = gj;
          for (std::size_t k = 0; k <= j; ++k) z(j, k) -= f * e[k] + gj * z(i, k);
        }
      }
    } else {
      e[i] = z(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] != 0.0) {
      for (std::size_t j = 0; j < i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k < i; ++k) g += z(i, k) * z(k, j);
        for (std::size_t k = 0; k < i; ++k) z(k, j) -= g * z(k, i);
      }
    }
    d[i] = z(i, i);
    z(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      z(i, j) = 0.0;
      z(j, i) = 0.0;
    }
  }
}

// implicit-shift QL on the tridiagonal (d, e); plane rotations are applied to
// the eigenvector columns zc, which stay orthonormal throughout
void ql_implicit(Vector& d, Vector& e, std::vector<Vector>& zc) {
  const std::size_t n = d.size();
  if (n == 1) return;
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= eps * dd + 1e-300) break;
      }
      if (m != l) {
        if (iter++ == 50) throw NumericalFailure("eig: QL iteration failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          simd::rot2(zc[i].data(), zc[i + 1].data(), c, s, zc[i].size());
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

struct CorePairs {
  Vector values;
  std::vector<Vector> vectors;
};

CorePairs dense_sym_core(const SymmetricMatrix& a) {
  const std::size_t n = a.size();
  require(n >= 1, "eig: empty problem");
  Vector d, e;
  std::vector<Vector> zc(n, Vector(n, 0.0));
  {
    Matrix z;
    tridiagonalize(a, d, e, z);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) zc[j][i] = z(i, j);
  }
  ql_implicit(d, e, zc);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
  CorePairs out;
  out.values.resize(n);
  out.vectors.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = d[order[j]];
    out.vectors[j] = std::move(zc[order[j]]);
  }
  return out;
}

// residuals ||A x - lambda M x|| relative to the spectral radius; throws when
// a solve silently lost accuracy
Vector residual_check(const SymmetricMatrix& a, const SymmetricMatrix* m,
                      const Vector& values, const std::vector<Vector>& vectors) {
  const std::size_t n = values.size();
  double radius = 0.0;
  for (double v : values) radius = std::max(radius, std::fabs(v));
  Vector res(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    Vector ax = matvec(a, vectors[j]);
    Vector mx = m ? matvec(*m, vectors[j]) : vectors[j];
    axpy_inplace(-values[j], mx, ax);
    const double denom = std::max(radius * norm2(mx), 1e-300);
    res[j] = radius == 0.0 ? norm2(ax) : norm2(ax) / denom;
    if (res[j] > 1e-6) throw NumericalFailure("eig: residual check failed");
  }
  return res;
}

}  // namespace

EigenSolution sym_eig(const SymmetricMatrix& a) {
  CorePairs core = dense_sym_core(a);
  EigenSolution sol;
  sol.eigenvalues = std::move(core.values);
  sol.eigenvectors = std::move(core.vectors);
  sol.residuals = residual_check(a, nullptr, sol.eigenvalues, sol.eigenvectors);
  return sol;
}

EigenSolution generalized_symmetric_eig(const SymmetricMatrix& a, const SymmetricMatrix& m,
                                        int dim_cap) {
  const std::size_t n = a.size();
  require(m.size() == n, "eig: dimension mismatch");
  require(int(n) <= dim_cap, "eig: dimension exceeds the dense solver cap");
  const CholeskyFactor chol = cholesky(m);

  // congruence b = l^{-1} a l^{-T}, assembled row by row so every inner loop
  // runs over contiguous memory
  SymmetricMatrix b(n);
  {
    const Matrix afull = a.full();
    std::vector<Vector> pcols(n);  // columns of l^{-1} a
    for (std::size_t j = 0; j < n; ++j) {
      Vector col(afull.row(j), afull.row(j) + n);  // column j = row j, symmetric
      chol.solve_lower(col);
      pcols[j] = std::move(col);
    }
    Matrix brm(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      double* bi = brm.row(i);
      std::copy(pcols[i].begin(), pcols[i].end(), bi);
      for (std::size_t k = 0; k < i; ++k) simd::axpy(-chol.l(i, k), brm.row(k), bi, n);
      const double inv = 1.0 / chol.l(i, i);
      for (std::size_t jj = 0; jj < n; ++jj) bi[jj] *= inv;
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) b.lower(i, j) = 0.5 * (brm(i, j) + brm(j, i));
  }

  CorePairs core = dense_sym_core(b);
  EigenSolution sol;
  sol.eigenvalues = std::move(core.values);
  sol.eigenvectors = std::move(core.vectors);
  for (Vector& x : sol.eigenvectors) chol.solve_lower_t(x);  // M-orthonormal now
  sol.residuals = residual_check(a, &m, sol.eigenvalues, sol.eigenvectors);
  return sol;
}

std::vector<SpectrumLine> cluster_spectrum(const Vector& ascending, double rel_tol) {
  std::vector<SpectrumLine> lines;
  if (ascending.empty()) return lines;
  double radius = 0.0;
  for (double v : ascending) radius = std::max(radius, std::fabs(v));
  const double tol = rel_tol * std::max(radius, 1e-300);
  double sum = ascending[0];
  int count = 1;
  for (std::size_t i = 1; i <= ascending.size(); ++i) {
    const bool flush =
        i == ascending.size() || ascending[i] - ascending[i - 1] > tol;
    if (flush) {
      lines.push_back({sum / count, count});
      if (i < ascending.size()) {
        sum = ascending[i];
        count = 1;
      }
    } else {
      require(ascending[i] >= ascending[i - 1], "cluster_spectrum: input not ascending");
      sum += ascending[i];
      ++count;
    }
  }
  return lines;
}

namespace {

// distinct nonzero frequency moduli |2 pi k / L| up to the cutoff, with the
// number of integer vectors realizing each
std::vector<std::pair<double, long long>> frequency_shells(int n,
                                                           const std::array<double, 3>& lengths,
                                                           double cutoff) {
  std::array<int, 3> kmax{0, 0, 0};
  for (int a = 0; a < n; ++a)
    kmax[a] = int(std::ceil(cutoff * lengths[a] / kTwoPi)) + 1;
  std::vector<double> moduli;
  const int k1 = n > 1 ? kmax[1] : 0;
  const int k2 = n > 2 ? kmax[2] : 0;
  for (int a = -kmax[0]; a <= kmax[0]; ++a)
    for (int b = -k1; b <= k1; ++b)
      for (int c = -k2; c <= k2; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        double sq = (kTwoPi * a / lengths[0]) * (kTwoPi * a / lengths[0]);
        if (n > 1) sq += (kTwoPi * b / lengths[1]) * (kTwoPi * b / lengths[1]);
        if (n > 2) sq += (kTwoPi * c / lengths[2]) * (kTwoPi * c / lengths[2]);
        const double r = std::sqrt(sq);
        if (r <= cutoff * (1.0 + 1e-12)) moduli.push_back(r);
      }
  std::sort(moduli.begin(), moduli.end());
  std::vector<std::pair<double, long long>> shells;
  for (double r : moduli) {
    if (!shells.empty() && r - shells.back().first <= 1e-9 * r)
      ++shells.back().second;
    else
      shells.push_back({r, 1});
  }
  return shells;
}

}  // namespace

double oracle_shell_cutoff(int n, std::array<double, 3> lengths, int shells) {
  require(n >= 1 && n <= 3, "oracle: dimension must be 1..3");
  require(shells >= 1, "oracle: need at least one shell");
  double lmax = 0.0;
  for (int a = 0; a < n; ++a) lmax = std::max(lmax, lengths[a]);
  const double probe = kTwoPi * shells / lmax * (1.0 + 1e-9);
  const auto found = frequency_shells(n, lengths, probe);
  require(int(found.size()) >= shells, "oracle: shell enumeration too small");
  return found[std::size_t(shells) - 1].first * (1.0 + 1e-9);
}

OracleSpectrum torus_dirac_oracle(int n, std::array<double, 3> lengths, double mass,
                                  double cutoff) {
  require(n >= 1 && n <= 3, "oracle: dimension must be 1..3");
  require(cutoff > 0.0, "oracle: cutoff must be positive");
  require(mass >= 0.0 && std::isfinite(mass), "oracle: mass must be finite and >= 0");
  for (int a = 0; a < n; ++a) require(lengths[a] > 0.0, "oracle: lengths must be positive");

  const long long half = 1LL << (n - 1);
  std::vector<SpectrumLine> lines;
  if (mass == 0.0)
    lines.push_back({0.0, int(2 * half)});
  else {
    lines.push_back({-mass, int(half)});
    lines.push_back({mass, int(half)});
  }
  for (const auto& [r, vecs] : frequency_shells(n, lengths, cutoff)) {
    const double lam = std::sqrt(r * r + mass * mass);
    const int mult = int(vecs * half);
    lines.push_back({-lam, mult});
    lines.push_back({lam, mult});
  }
  std::sort(lines.begin(), lines.end(),
            [](const SpectrumLine& x, const SpectrumLine& y) { return x.value < y.value; });
  OracleSpectrum out;
  out.lines = std::move(lines);
  out.cutoff = cutoff;
  return out;
}

std::vector<ConvergenceReport> eigenvalue_convergence(const std::vector<Lattice>& lattices,
                                                      const PerturbationSpec& spec,
                                                      const std::vector<double>& targets) {
  require(lattices.size() >= 3, "convergence: need at least three meshes");
  require(!targets.empty(), "convergence: no targets");
  require(!spec.potential, "convergence: oracle matching requires zero potential");
  const int n = lattices[0].dim;
  for (const Lattice& lat : lattices) {
    lat.validate();
    require(lat.dim == n, "convergence: mixed dimensions");
    for (int a = 0; a < n; ++a)
      require(lat.lengths[a] == lattices[0].lengths[a], "convergence: mixed lengths");
  }

  OracleSpectrum oracle =
      torus_dirac_oracle(n, lattices[0].lengths, spec.mass,
                         oracle_shell_cutoff(n, lattices[0].lengths, 4));
  if (spec.shift != 0.0)
    for (SpectrumLine& line : oracle.lines) line.value += spec.shift;

  std::vector<ConvergenceReport> reports;
  reports.reserve(targets.size());
  for (double t : targets) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < oracle.lines.size(); ++i)
      if (std::fabs(oracle.lines[i].value - t) < std::fabs(oracle.lines[best].value - t))
        best = i;
    ConvergenceReport rep;
    rep.target = oracle.lines[best].value;
    rep.oracle_multiplicity = oracle.lines[best].multiplicity;
    reports.push_back(rep);
  }

  for (const Lattice& lat : lattices) {
    auto rc = DeRhamComplex::build(PeriodicMesh::build(lat));
    const BlockOperator a0 = assemble_dirac_form(*rc);
    const BlockOperator m = graded_mass(*rc);
    const BlockOperator a = perturbed_operator(a0, m, spec);
    const EigenSolution sol = generalized_symmetric_eig(a.matrix, m.matrix);

    for (ConvergenceReport& rep : reports) {
      const std::size_t want = std::size_t(rep.oracle_multiplicity);
      require(sol.eigenvalues.size() >= want, "convergence: mesh too coarse for target");
      std::vector<double> dist(sol.eigenvalues.size());
      for (std::size_t i = 0; i < dist.size(); ++i)
        dist[i] = std::fabs(sol.eigenvalues[i] - rep.target);
      std::vector<std::size_t> order(dist.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(),
                [&](std::size_t x, std::size_t y) { return dist[x] < dist[y]; });
      double maxerr = 0.0, mean = 0.0;
      for (std::size_t i = 0; i < want; ++i) {
        maxerr = std::max(maxerr, dist[order[i]]);
        mean += sol.eigenvalues[order[i]];
      }
      mean /= double(want);
      // the matched cluster must stay clear of every other oracle line
      double gap = std::numeric_limits<double>::infinity();
      for (const SpectrumLine& line : oracle.lines)
        if (line.value != rep.target || line.multiplicity != rep.oracle_multiplicity)
          gap = std::min(gap, std::fabs(line.value - rep.target));
      if (maxerr >= 0.5 * gap) rep.ambiguous = true;
      rep.rows.push_back({lat.subdivisions, rc->width(), mean, maxerr});
    }
  }

  for (ConvergenceReport& rep : reports) {
    Vector hs, errs;
    for (const ConvergenceRow& row : rep.rows)
      if (row.error > 0.0) {
        hs.push_back(row.h);
        errs.push_back(row.error);
      }
    if (hs.size() >= 2) {
      const LineFit fit = fit_loglog(hs, errs);
      rep.slope = fit.slope;
      rep.r2 = fit.r2;
    }
  }
  return reports;
}

double infsup_constant(const SymmetricMatrix& form, const SymmetricMatrix& row_norm,
                       const SymmetricMatrix& col_norm, const Matrix& basis) {
  const std::size_t d = form.size();
  require(row_norm.size() == d && col_norm.size() == d, "infsup: operator size mismatch");
  require(basis.rows() == d && basis.cols() >= 1, "infsup: basis must have columns");
  const std::size_t r = basis.cols();

  std::vector<Vector> cols(r);
  for (std::size_t j = 0; j < r; ++j) cols[j] = basis.col(j);
  auto reduce = [&](const SymmetricMatrix& s) {
    Matrix red(r, r);
    for (std::size_t j = 0; j < r; ++j) {
      const Vector y = matvec(s, cols[j]);
      for (std::size_t i = 0; i < r; ++i) red(i, j) = dot(cols[i], y);
    }
    return red;
  };
  const Matrix fr = reduce(form);
  auto packed = [&](const Matrix& mfull) {
    SymmetricMatrix s(r);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j <= i; ++j) s.lower(i, j) = 0.5 * (mfull(i, j) + mfull(j, i));
    return s;
  };
  const CholeskyFactor lr = cholesky(packed(reduce(row_norm)));
  const CholeskyFactor lc = cholesky(packed(reduce(col_norm)));

  // g = lr^{-1} fr lc^{-T}; smallest singular value of g is the constant
  Matrix ht(r, r);  // ht column j solves lc x = column j of fr^T
  for (std::size_t j = 0; j < r; ++j) {
    Vector col(r);
    for (std::size_t i = 0; i < r; ++i) col[i] = fr(j, i);
    lc.solve_lower(col);
    ht.set_col(j, col);
  }
  Matrix g(r, r);
  for (std::size_t i = 0; i < r; ++i) {
    double* gi = g.row(i);
    for (std::size_t j = 0; j < r; ++j) gi[j] = ht(j, i);
    for (std::size_t k = 0; k < i; ++k) simd::axpy(-lr.l(i, k), g.row(k), gi, r);
    const double inv = 1.0 / lr.l(i, i);
    for (std::size_t j = 0; j < r; ++j) gi[j] *= inv;
  }
  const SvdResult svd = jacobi_svd(g);
  return svd.sigma.back();
}

}  // namespace wdirac
