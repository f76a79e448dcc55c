#include <cmath>

#include "doctest.h"
#include "wdirac/quadrature.hpp"
#include "wdirac/rng.hpp"
#include "wdirac/whitney.hpp"

using namespace wdirac;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::shared_ptr<const DeRhamComplex> make_complex(int n, int m,
                                                  std::array<double, 3> len = {1, 1, 1}) {
  Lattice lat;
  lat.dim = n;
  lat.subdivisions = m;
  lat.lengths = len;
  return DeRhamComplex::build(PeriodicMesh::build(lat));
}

Cochain random_cochain(const DeRhamComplex& rc, int k, SplitMix64& rng) {
  Cochain u{k, Vector(std::size_t(rc.dof_count(k)), 0.0)};
  for (double& v : u.values) v = rng.normal();
  return u;
}

// integral of |u|^2 over the torus by per-cell quadrature; the integrand is
// quadratic in barycentric coordinates, so a degree-2 rule is already exact
double quadrature_l2_sq(const DeRhamComplex& rc, const Cochain& u, int order = 4) {
  const PeriodicMesh& mesh = rc.mesh();
  const int n = mesh.dim();
  const QuadRule rule = simplex_rule(n, order);
  const int ncomp = form_component_count(n, u.degree);
  std::vector<double> vals(std::size_t(ncomp), 0.0);
  double total = 0.0;
  const double fact = n == 1 ? 1.0 : (n == 2 ? 2.0 : 6.0);
  for (int c = 0; c < mesh.count(n); ++c) {
    double cell_acc = 0.0;
    for (std::size_t p = 0; p < rule.size(); ++p) {
      std::array<double, 4> lambda{0.0, 0.0, 0.0, 0.0};
      double rest = 1.0;
      for (int r = 0; r < n; ++r) {
        lambda[std::size_t(r) + 1] = rule.points[p][r];
        rest -= rule.points[p][r];
      }
      lambda[0] = rest;
      rc.evaluate_in_cell(u, c, lambda, vals.data());
      double s = 0.0;
      for (int ci = 0; ci < ncomp; ++ci) s += vals[ci] * vals[ci];
      cell_acc += rule.weights[p] * s;
    }
    total += cell_acc * fact * mesh.measure(n, c);
  }
  return total;
}

}  // namespace

TEST_CASE("1d mass matrices match the hand-derived circulants") {
  auto rc = make_complex(1, 4);
  const double h = 0.25;
  const Matrix m0 = rc->mass(0).to_dense();
  const Matrix m1 = rc->mass(1).to_dense();
  REQUIRE(m0.rows() == 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const int gap = std::min((i - j + 4) % 4, (j - i + 4) % 4);
      const double want0 = gap == 0 ? 4.0 * h / 6.0 : (gap == 1 ? h / 6.0 : 0.0);
      CHECK(m0(i, j) == doctest::Approx(want0).epsilon(1e-13));
      CHECK(m1(i, j) == doctest::Approx(i == j ? 1.0 / h : 0.0).epsilon(1e-13));
    }
}

TEST_CASE("coboundary squares to zero in integer arithmetic") {
  for (int n : {2, 3}) {
    auto rc = make_complex(n, 3);
    for (int k = 0; k + 1 < n; ++k) {
      const SparseIntMatrix dd = multiply(rc->coboundary(k + 1), rc->coboundary(k));
      CHECK(dd.max_abs() == 0);
    }
  }
}

TEST_CASE("sum of vertex mass entries recovers the torus volume") {
  auto rc = make_complex(2, 3, {2.0, 1.0, 1.0});
  const Vector ones(std::size_t(rc->dof_count(0)), 1.0);
  const Cochain u{0, ones};
  CHECK(rc->l2_inner(u, u) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("degrees of freedom are unisolvent on the whitney space") {
  SplitMix64 rng(2024);
  for (int n : {1, 2, 3}) {
    auto rc = make_complex(n, 3);
    for (int k = 0; k <= n; ++k) {
      const Cochain u = random_cochain(*rc, k, rng);
      FormField rep(n, k, [&](const std::array<double, 3>& x, double* out) {
        rc->evaluate(u, x, out);
      });
      const Cochain back = rc->interpolate(rep, 3);
      double err = 0.0;
      for (std::size_t i = 0; i < u.values.size(); ++i)
        err = std::max(err, std::fabs(back.values[i] - u.values[i]));
      CHECK(err < 1e-10);
    }
  }
}

TEST_CASE("constant forms are reproduced exactly") {
  SplitMix64 rng(7);
  for (int n : {1, 2, 3}) {
    auto rc = make_complex(n, 4);
    for (int k = 0; k <= n; ++k) {
      const int ncomp = form_component_count(n, k);
      std::vector<double> comp(std::size_t(ncomp), 0.0);
      for (double& v : comp) v = rng.normal();
      const Cochain u = rc->interpolate(constant_form(n, k, comp), 2);
      std::vector<double> got(std::size_t(ncomp), 0.0);
      for (int trial = 0; trial < 20; ++trial) {
        std::array<double, 3> x{rng.uniform(), rng.uniform(), rng.uniform()};
        rc->evaluate(u, x, got.data());
        for (int ci = 0; ci < ncomp; ++ci)
          CHECK(got[std::size_t(ci)] == doctest::Approx(comp[std::size_t(ci)]).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("interpolating dx gives edge displacements") {
  auto rc = make_complex(2, 3);
  const Cochain u = rc->interpolate(constant_form(2, 1, {1.0, 0.0}), 2);
  const PeriodicMesh& mesh = rc->mesh();
  for (int e = 0; e < mesh.count(1); ++e) {
    const double* q = mesh.coords(1, e);
    CHECK(u.values[std::size_t(e)] == doctest::Approx(q[2] - q[0]).epsilon(1e-12));
  }
}

TEST_CASE("interpolation commutes with the exterior derivative") {
  auto rc = make_complex(2, 4);
  FormField u0 = scalar_form(2, [](const std::array<double, 3>& x) {
    return std::sin(kTwoPi * x[0]) * std::cos(kTwoPi * x[1]);
  });
  FormField du(2, 1, [](const std::array<double, 3>& x, double* out) {
    out[0] = kTwoPi * std::cos(kTwoPi * x[0]) * std::cos(kTwoPi * x[1]);
    out[1] = -kTwoPi * std::sin(kTwoPi * x[0]) * std::sin(kTwoPi * x[1]);
  });
  // the identity is exact up to the quadrature of the edge integrals, so the
  // defect must be small and must collapse when the order is raised
  double err[2] = {0.0, 0.0};
  int slot = 0;
  for (int order : {5, 9}) {
    const Cochain lhs = rc->apply_d(rc->interpolate(u0, order));
    const Cochain rhs = rc->interpolate(du, order);
    for (std::size_t i = 0; i < lhs.values.size(); ++i)
      err[slot] = std::max(err[slot], std::fabs(lhs.values[i] - rhs.values[i]));
    ++slot;
  }
  CHECK(err[0] < 1e-4);
  CHECK(err[1] < 1e-8);
  CHECK(err[1] < 1e-2 * err[0]);
}

TEST_CASE("scalar interpolation error decays at second order") {
  std::vector<double> errs;
  for (int m : {8, 16, 32}) {
    auto rc = make_complex(1, m);
    FormField u = scalar_form(1, [](const std::array<double, 3>& x) {
      return std::sin(kTwoPi * x[0]);
    });
    const Cochain uh = rc->interpolate(u, 5);
    // fine quadrature of the squared pointwise error
    const QuadRule rule = gauss_legendre(9);
    double acc = 0.0;
    const PeriodicMesh& mesh = rc->mesh();
    for (int c = 0; c < mesh.count(1); ++c) {
      const double* q = mesh.coords(1, c);
      for (std::size_t p = 0; p < rule.size(); ++p) {
        const double t = rule.points[p][0];
        const std::array<double, 4> lambda{1.0 - t, t, 0.0, 0.0};
        double got = 0.0;
        rc->evaluate_in_cell(uh, c, lambda, &got);
        const double x = q[0] + t * (q[1] - q[0]);
        const double d = got - std::sin(kTwoPi * x);
        acc += rule.weights[p] * d * d * mesh.measure(1, c);
      }
    }
    errs.push_back(std::sqrt(acc));
  }
  const double o1 = std::log2(errs[0] / errs[1]);
  const double o2 = std::log2(errs[1] / errs[2]);
  CHECK(o1 == doctest::Approx(2.0).epsilon(0.05));
  CHECK(o2 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("mass inner product agrees with quadrature") {
  SplitMix64 rng(99);
  for (int n : {1, 2, 3}) {
    auto rc = make_complex(n, 3);
    for (int k = 0; k <= n; ++k) {
      const Cochain u = random_cochain(*rc, k, rng);
      const double viaM = rc->l2_inner(u, u);
      const double viaQ = quadrature_l2_sq(*rc, u);
      CHECK(viaM == doctest::Approx(viaQ).epsilon(1e-10));
      CHECK(viaM > 0.0);
    }
  }
}

TEST_CASE("all-ones vertex cochain evaluates to one everywhere") {
  SplitMix64 rng(5);
  auto rc = make_complex(2, 5);
  const Cochain u{0, Vector(std::size_t(rc->dof_count(0)), 1.0)};
  for (int trial = 0; trial < 50; ++trial) {
    std::array<double, 3> x{rng.uniform(), rng.uniform(), 0.0};
    double got = 0.0;
    rc->evaluate(u, x, &got);
    CHECK(got == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("single-cell top form has density of one over the cell volume") {
  auto rc = make_complex(2, 3);
  const PeriodicMesh& mesh = rc->mesh();
  const int cell = 4;
  Cochain u{2, Vector(std::size_t(rc->dof_count(2)), 0.0)};
  u.values[cell] = 1.0;
  const std::array<double, 4> mid{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0};
  double got = 0.0;
  rc->evaluate_in_cell(u, cell, mid, &got);
  const double want = mesh.cell_orientation(cell) / mesh.measure(2, cell);
  CHECK(got == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("mass matrices stay well conditioned") {
  for (auto [n, m] : {std::pair{1, 8}, {2, 4}, {3, 3}}) {
    auto rc = make_complex(n, m);
    for (int k = 0; k <= n; ++k) {
      const SymmetricMatrix& mk = rc->mass_dense(k);
      const CholeskyFactor chol = cholesky(mk);  // SPD or throws
      const std::size_t dim = mk.size();
      Vector x(dim, 1.0);
      double lo = 0.0, hi = 0.0;
      for (int it = 0; it < 200; ++it) {
        Vector y = matvec(mk, x);
        hi = norm2(y) / norm2(x);
        x = scaled(y, 1.0 / norm2(y));
      }
      x.assign(dim, 1.0);
      x[0] = 2.0;
      for (int it = 0; it < 200; ++it) {
        Vector y = chol.solve(x);
        lo = norm2(x) / norm2(y);
        x = scaled(y, 1.0 / norm2(y));
      }
      CHECK(hi / lo < 1e3);
    }
  }
}

TEST_CASE("graded flatten and inner product are consistent") {
  SplitMix64 rng(11);
  auto rc = make_complex(2, 3);
  GradedCochain u;
  u.dim = 2;
  double blocks = 0.0;
  for (int k = 0; k <= 2; ++k) {
    const Cochain c = random_cochain(*rc, k, rng);
    u.values[k] = c.values;
    blocks += rc->l2_inner(c, c);
  }
  CHECK(rc->l2_inner(u, u) == doctest::Approx(blocks).epsilon(1e-13));
  const Vector flat = rc->flatten(u);
  REQUIRE(int(flat.size()) == rc->total_dof_count());
  const GradedCochain back = rc->unflatten(flat);
  for (int k = 0; k <= 2; ++k)
    for (std::size_t i = 0; i < u.values[k].size(); ++i)
      CHECK(back.values[k][i] == u.values[k][i]);
}
