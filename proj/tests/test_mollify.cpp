#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "wdirac/mollify.hpp"
#include "wdirac/norms.hpp"
#include "wdirac/quadrature.hpp"
#include "wdirac/rng.hpp"

using namespace wdirac;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::shared_ptr<const DeRhamComplex> make_complex(int n, int m) {
  Lattice lat;
  lat.dim = n;
  lat.subdivisions = m;
  return DeRhamComplex::build(PeriodicMesh::build(lat));
}

Cochain random_cochain(const DeRhamComplex& rc, int k, SplitMix64& rng) {
  Cochain u{k, Vector(std::size_t(rc.dof_count(k)), 0.0)};
  for (double& v : u.values) v = rng.normal();
  return u;
}

double max_abs_diff(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

double max_abs(const Vector& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

// L2 distance between the smoothed Whitney representative and the raw one,
// by a per-cell rule fine enough for the comparison
double smoothing_gap(const DeRhamComplex& rc, const Mollifier& mol, const Cochain& u) {
  const PeriodicMesh& mesh = rc.mesh();
  const int n = mesh.dim();
  const int comps = form_component_count(n, u.degree);
  const FormField w = whitney_field(rc.shared(), u);
  const QuadRule rule = simplex_rule(n, 8);
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= double(i);
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
        for (int ax = 0; ax < n; ++ax) pos[std::size_t(ax)] += lam[std::size_t(v)] * qv[v * n + ax];
      rc.evaluate_in_cell(u, cell, lam, a);
      convolve(rc, mol, w, pos, b, 7);
      double d2 = 0.0;
      for (int c = 0; c < comps; ++c) {
        const double d = a[c] - b[c];
        d2 += d * d;
      }
      acc += fact * mesh.measure(n, cell) * rule.weights[p] * d2;
    }
  }
  return std::sqrt(acc);
}

}  // namespace

TEST_CASE("mollifier has unit mass and compact support") {
  for (int dim = 1; dim <= 3; ++dim)
    for (int q : {1, 3, 5}) {
      const Mollifier mol = make_mollifier(dim, q);
      CHECK(mollifier_mass(mol) == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(mol.profile(1.0) == 0.0);
      CHECK(mol.profile(1.5) == 0.0);
      CHECK(mol.profile(0.0) == doctest::Approx(mol.normalization));
    }

  // hand values of the one and two dimensional normalizations at q = 3
  CHECK(make_mollifier(1, 3).normalization == doctest::Approx(35.0 / 32.0).epsilon(1e-14));
  CHECK(make_mollifier(2, 3).normalization ==
        doctest::Approx(4.0 / 3.141592653589793).epsilon(1e-14));

  CHECK_THROWS_AS((void)make_mollifier(1, 3, 0.5), std::invalid_argument);
  CHECK_THROWS_AS((void)make_mollifier(1, 3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)make_mollifier(1, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)make_mollifier(4, 3), std::invalid_argument);
}

TEST_CASE("convolution reproduces constants and commutes with grid shifts") {
  double out[4];
  for (int n = 1; n <= 2; ++n) {
    auto rc = make_complex(n, n == 1 ? 8 : 3);
    const Mollifier mol = make_mollifier(n);
    for (int k = 0; k <= n; ++k) {
      const int comps = form_component_count(n, k);
      std::vector<double> vals(std::size_t(comps), 0.0);
      for (int c = 0; c < comps; ++c) vals[std::size_t(c)] = 0.7 + 0.4 * c;
      const FormField f = constant_form(n, k, vals);
      const std::array<double, 3> x{0.31, 0.64, 0.0};
      convolve(*rc, mol, f, x, out, 7);
      for (int c = 0; c < comps; ++c)
        CHECK(out[c] == doctest::Approx(vals[std::size_t(c)]).epsilon(1e-12));
    }
  }

  // shifting a cochain by one lattice step shifts its smoothed field exactly
  for (int n = 1; n <= 2; ++n) {
    const int m = n == 1 ? 8 : 3;
    const double h = 1.0 / m;
    auto rc = make_complex(n, m);
    const Mollifier mol = make_mollifier(n);
    const std::array<double, 3> tau{h, n == 2 ? h : 0.0, 0.0};
    auto f = [](const std::array<double, 3>& x) {
      return std::sin(kTwoPi * x[0]) + 0.5 * std::cos(kTwoPi * x[1]);
    };
    auto g = [&](const std::array<double, 3>& x) { return f({x[0] - tau[0], x[1] - tau[1], 0.0}); };
    const FormField wu = whitney_field(rc, rc->interpolate(scalar_form(n, f), 7));
    const FormField wv = whitney_field(rc, rc->interpolate(scalar_form(n, g), 7));
    SplitMix64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
      const std::array<double, 3> x{rng.uniform(), rng.uniform(), 0.0};
      double a = 0.0, b = 0.0;
      convolve(*rc, mol, wv, {x[0] + tau[0], x[1] + tau[1], 0.0}, &b, 7);
      convolve(*rc, mol, wu, x, &a, 7);
      CHECK(a == doctest::Approx(b).epsilon(1e-10));
    }
  }
}

TEST_CASE("smoothing error shrinks with the radius") {
  auto rc = make_complex(1, 8);
  const Cochain u = rc->interpolate(scalar_form(1, [](const std::array<double, 3>& x) {
                                      return std::sin(kTwoPi * x[0]);
                                    }),
                                    7);
  SlobodetskijSpec spec;
  const double denom = std::pow(rc->width(), spec.s) * slobodetskij(*rc, u, spec).value;
  REQUIRE(denom > 0.0);
  double last = -1.0;
  for (double eps : {0.4, 0.3, 0.2, 0.1}) {
    const double delta = smoothing_gap(*rc, make_mollifier(1, 3, eps), u) / denom;
    CHECK(delta > 0.0);
    if (last >= 0.0) CHECK(delta < last);
    last = delta;
  }
}

TEST_CASE("projector reproduces the subcomplex and is idempotent") {
  for (int n = 1; n <= 2; ++n) {
    auto rc = make_complex(n, n == 1 ? 8 : 3);
    const SmoothedProjector proj = build_projector(rc, make_mollifier(n), 5);
    SplitMix64 rng(5);
    for (int k = 0; k <= n; ++k) {
      CHECK(proj.condition(k) < 1e6);
      for (int trial = 0; trial < 50; ++trial) {
        const Cochain u = random_cochain(*rc, k, rng);
        const Cochain pu = proj.project(u);
        CHECK(max_abs_diff(pu.values, u.values) <= 1e-9 * std::max(1.0, max_abs(u.values)));
        const Cochain ppu = proj.project(pu);
        CHECK(max_abs_diff(ppu.values, pu.values) <= 1e-9 * std::max(1.0, max_abs(pu.values)));
      }
    }
  }

  // the field path is split-exact on the circle, so projecting the Whitney
  // representative of a projected cochain returns it to machine precision
  auto rc = make_complex(1, 8);
  const SmoothedProjector proj = build_projector(rc, make_mollifier(1), 5);
  SplitMix64 rng(6);
  for (int k = 0; k <= 1; ++k) {
    const Cochain u = proj.project(random_cochain(*rc, k, rng));
    const Cochain v = proj.project(whitney_field(rc, u));
    CHECK(max_abs_diff(v.values, u.values) <= 1e-11 * std::max(1.0, max_abs(u.values)));
  }
}

TEST_CASE("projector commutes with the exterior derivative up to quadrature") {
  const FormField u = scalar_form(1, [](const std::array<double, 3>& x) {
    return std::sin(kTwoPi * x[0]) + 0.3 * std::cos(2.0 * kTwoPi * x[0]);
  });
  const FormField du(1, 1, [](const std::array<double, 3>& x, double* out) {
    out[0] = kTwoPi * std::cos(kTwoPi * x[0]) - 0.6 * kTwoPi * std::sin(2.0 * kTwoPi * x[0]);
  });
  auto rc = make_complex(1, 4);
  const Mollifier mol = make_mollifier(1);
  double resid[4];
  int at = 0;
  for (int order : {5, 7, 9, 11})
    resid[at++] = commutation_residual(build_projector(rc, mol, order), u, du);
  // on the circle the split rules are exact on the subcomplex, so the
  // residual is pure smooth-quadrature error and drops fast with the order
  for (int i = 1; i < 4; ++i) CHECK(resid[i] < resid[i - 1]);
  CHECK(resid[2] <= 1e-6);
  CHECK(resid[2] > 1e-13);
  CHECK(resid[3] <= 0.5 * resid[2]);

  // in two dimensions the smoothed fields kink along curves the simplex
  // rules cannot split, so the residual is small but only algebraically so
  auto rc2 = make_complex(2, 3);
  const FormField u2 = scalar_form(2, [](const std::array<double, 3>& x) {
    return std::sin(kTwoPi * x[0]) * std::cos(kTwoPi * x[1]);
  });
  const FormField du2(2, 1, [](const std::array<double, 3>& x, double* out) {
    out[0] = kTwoPi * std::cos(kTwoPi * x[0]) * std::cos(kTwoPi * x[1]);
    out[1] = -kTwoPi * std::sin(kTwoPi * x[0]) * std::sin(kTwoPi * x[1]);
  });
  const double plane7 = commutation_residual(build_projector(rc2, make_mollifier(2), 7), u2, du2);
  const double plane9 = commutation_residual(build_projector(rc2, make_mollifier(2), 9), u2, du2);
  CHECK(plane7 < 0.05);
  CHECK(plane9 < plane7);
}

TEST_CASE("projector family stays bounded on l2 across refinement") {
  Lattice base;
  base.dim = 1;
  const auto reports = stability_experiment(base, {4, 8, 16}, make_mollifier(1), 5);
  REQUIRE(reports.size() == 3);
  for (int k = 0; k <= 1; ++k) {
    double lo = 0.0, hi = 0.0;
    for (const StabilityReport& rep : reports) {
      CHECK(rep.condition[std::size_t(k)] < 100.0);
      CHECK(rep.equiv_min[std::size_t(k)] > 0.05);
      CHECK(rep.equiv_max[std::size_t(k)] < 1.95);
      CHECK(rep.equiv_min[std::size_t(k)] <= rep.equiv_max[std::size_t(k)]);
      const double nm = rep.l2_norm[std::size_t(k)];
      // smoothing fixes constants, so the lower equivalence constant is at
      // most one and the inverse restriction norm at least one
      CHECK(nm >= 1.0 - 1e-9);
      lo = lo == 0.0 ? nm : std::min(lo, nm);
      hi = std::max(hi, nm);
    }
    CHECK(hi / lo < 1.5);
  }
}

TEST_CASE("projector converges to smooth fields at the measured orders") {
  Lattice base;
  base.dim = 1;
  const FormField u = scalar_form(1, [](const std::array<double, 3>& x) {
    return std::sin(kTwoPi * x[0]);
  });
  const ProjectorRates rates =
      rate_experiment(base, {8, 16, 32}, u, make_mollifier(1), 5, 0.4);
  REQUIRE(rates.widths.size() == 3);
  for (std::size_t i = 1; i < rates.widths.size(); ++i) {
    CHECK(rates.projector_error[i] < rates.projector_error[i - 1]);
    CHECK(rates.smoothed_interp_error[i] < rates.smoothed_interp_error[i - 1]);
    CHECK(rates.fractional_error[i] < rates.fractional_error[i - 1]);
  }
  CHECK(rates.projector_order >= 0.8);
  CHECK(rates.smoothed_interp_order >= 0.8);
  CHECK(rates.fractional_order >= 0.35);

  // constants are reproduced exactly on every mesh of the family
  const ProjectorRates flat =
      rate_experiment(base, {4, 8, 16}, constant_form(1, 0, {1.3}), make_mollifier(1), 5, 0.4);
  for (double e : flat.projector_error) CHECK(e <= 1e-10);
}

TEST_CASE("smoothing rejects unsupported requests with an explanation") {
  auto rc3 = make_complex(3, 3);
  CHECK_THROWS_AS((void)build_projector(rc3, make_mollifier(3), 5), std::invalid_argument);
  double out[4];
  CHECK_THROWS_AS(
      convolve(*rc3, make_mollifier(3), constant_form(3, 0, {1.0}), {0.1, 0.1, 0.1}, out, 7),
      std::invalid_argument);

  auto rc = make_complex(1, 4);
  CHECK_THROWS_AS((void)build_projector(rc, make_mollifier(2), 5), std::invalid_argument);
  CHECK_THROWS_AS(convolve(*rc, make_mollifier(1), constant_form(2, 0, {1.0}), {0.1, 0.0, 0.0},
                           out, 7),
                  std::invalid_argument);
}
