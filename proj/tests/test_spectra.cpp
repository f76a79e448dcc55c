#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "wdirac/rng.hpp"
#include "wdirac/spectra.hpp"

using namespace wdirac;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::shared_ptr<const DeRhamComplex> make_complex(int n, int m) {
  Lattice lat;
  lat.dim = n;
  lat.subdivisions = m;
  return DeRhamComplex::build(PeriodicMesh::build(lat));
}

SymmetricMatrix random_symmetric(std::size_t n, SplitMix64& rng) {
  SymmetricMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a.lower(i, j) = rng.normal();
  return a;
}

SymmetricMatrix random_spd(std::size_t n, SplitMix64& rng) {
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = rng.normal();
  const Matrix g = transpose(b) * b;
  SymmetricMatrix m = SymmetricMatrix::from_full(g, 1e-9);
  m.add_scaled_identity(0.5 + double(n));
  return m;
}

}  // namespace

TEST_CASE("diagonal hand matrix") {
  SymmetricMatrix a(3);
  a.lower(0, 0) = 2.0;
  a.lower(1, 1) = 3.0;
  a.lower(2, 2) = 5.0;
  const EigenSolution sol = sym_eig(a);
  REQUIRE(sol.eigenvalues.size() == 3);
  CHECK(sol.eigenvalues[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sol.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sol.eigenvalues[2] == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("generalized problem with equal matrices gives all ones") {
  auto rc = make_complex(1, 5);
  const SymmetricMatrix& m = rc->mass_dense(0);
  const EigenSolution sol = generalized_symmetric_eig(m, m);
  for (double v : sol.eigenvalues) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random generalized pairs solve to tight residuals") {
  SplitMix64 rng(404);
  const std::size_t n = 40;
  const SymmetricMatrix a = random_symmetric(n, rng);
  const SymmetricMatrix m = random_spd(n, rng);
  const EigenSolution sol = generalized_symmetric_eig(a, m);
  REQUIRE(sol.eigenvalues.size() == n);
  for (double r : sol.residuals) CHECK(r <= 1e-8);
  for (std::size_t i = 1; i < n; ++i) CHECK(sol.eigenvalues[i] >= sol.eigenvalues[i - 1]);
  // eigenvectors M-orthonormal
  for (std::size_t i = 0; i < n; i += 7)
    for (std::size_t j = 0; j < n; j += 5) {
      const double g = dot(sol.eigenvectors[i], matvec(m, sol.eigenvectors[j]));
      CHECK(g == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("eigenvalues are invariant under congruent permutation") {
  SplitMix64 rng(77);
  const std::size_t n = 24;
  const SymmetricMatrix a = random_symmetric(n, rng);
  const SymmetricMatrix m = random_spd(n, rng);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.next() % i]);
  SymmetricMatrix ap(n), mp(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const std::size_t pi = perm[i], pj = perm[j];
      ap.lower(i, j) = a(pi, pj);
      mp.lower(i, j) = m(pi, pj);
    }
  const EigenSolution s1 = generalized_symmetric_eig(a, m);
  const EigenSolution s2 = generalized_symmetric_eig(ap, mp);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(s1.eigenvalues[i] == doctest::Approx(s2.eigenvalues[i]).epsilon(1e-10));
}

TEST_CASE("1d dirac spectrum matches the circulant closed form") {
  auto rc = make_complex(1, 4);
  const BlockOperator a = assemble_dirac_form(*rc);
  const BlockOperator m = graded_mass(*rc);
  const EigenSolution sol = generalized_symmetric_eig(a.matrix, m.matrix);
  const double r48 = std::sqrt(48.0), r192 = std::sqrt(192.0);
  const double want[8] = {-r192, -r48, -r48, 0.0, 0.0, r48, r48, r192};
  REQUIRE(sol.eigenvalues.size() == 8);
  for (int i = 0; i < 8; ++i)
    CHECK(sol.eigenvalues[std::size_t(i)] == doctest::Approx(want[i]).epsilon(1e-10).scale(1.0));
}

TEST_CASE("dimension cap is enforced") {
  auto rc = make_complex(1, 4);
  const BlockOperator m = graded_mass(*rc);
  CHECK_THROWS_AS(generalized_symmetric_eig(m.matrix, m.matrix, 4), std::invalid_argument);
}

TEST_CASE("oracle spectra for the flat torus") {
  SUBCASE("1d massless") {
    const OracleSpectrum o = torus_dirac_oracle(1, {1, 1, 1}, 0.0, 4.5 * kTwoPi / 2.0);
    // lines: -4pi, -2pi, 0, 2pi, 4pi
    REQUIRE(o.lines.size() == 5);
    CHECK(o.lines[2].value == 0.0);
    CHECK(o.lines[2].multiplicity == 2);
    CHECK(o.lines[3].value == doctest::Approx(kTwoPi).epsilon(1e-14));
    CHECK(o.lines[3].multiplicity == 2);
    CHECK(o.lines[4].value == doctest::Approx(2 * kTwoPi).epsilon(1e-14));
    CHECK(o.lines[4].multiplicity == 2);
  }
  SUBCASE("2d first shell has multiplicity eight") {
    const OracleSpectrum o = torus_dirac_oracle(2, {1, 1, 1}, 0.0, kTwoPi * 1.1);
    REQUIRE(o.lines.size() == 3);
    CHECK(o.lines[1].multiplicity == 4);  // kernel 2^2
    CHECK(o.lines[2].value == doctest::Approx(kTwoPi).epsilon(1e-14));
    CHECK(o.lines[2].multiplicity == 8);
  }
  SUBCASE("massive kernel splits by parity") {
    const OracleSpectrum o = torus_dirac_oracle(1, {1, 1, 1}, 3.0, 1.0);
    REQUIRE(o.lines.size() == 2);
    CHECK(o.lines[0].value == doctest::Approx(-3.0));
    CHECK(o.lines[0].multiplicity == 1);
    CHECK(o.lines[1].value == doctest::Approx(3.0));
    CHECK(o.lines[1].multiplicity == 1);
  }
  SUBCASE("massive oracle is the sign map of the massless one") {
    const double cut = oracle_shell_cutoff(2, {1, 1, 1}, 3);
    const OracleSpectrum o0 = torus_dirac_oracle(2, {1, 1, 1}, 0.0, cut);
    const OracleSpectrum om = torus_dirac_oracle(2, {1, 1, 1}, 2.0, cut);
    REQUIRE(om.lines.size() == o0.lines.size() + 1);  // kernel line splits in two
    for (const SpectrumLine& line : o0.lines) {
      if (line.value == 0.0) continue;
      const double mapped = std::copysign(std::sqrt(line.value * line.value + 4.0), line.value);
      bool found = false;
      for (const SpectrumLine& ml : om.lines)
        if (std::fabs(ml.value - mapped) < 1e-12 && ml.multiplicity == line.multiplicity)
          found = true;
      CHECK(found);
    }
  }
}

TEST_CASE("mass perturbation maps the spectrum exactly") {
  for (int n : {1, 2}) {
    auto rc = make_complex(n, 4);
    const BlockOperator a = assemble_dirac_form(*rc);
    const BlockOperator m = graded_mass(*rc);
    const EigenSolution base = generalized_symmetric_eig(a.matrix, m.matrix);
    const double radius = std::max(std::fabs(base.eigenvalues.front()),
                                   std::fabs(base.eigenvalues.back()));
    for (double mass : {0.5, 3.0}) {
      PerturbationSpec spec;
      spec.mass = mass;
      const BlockOperator ap = perturbed_operator(a, m, spec);
      const EigenSolution pert = generalized_symmetric_eig(ap.matrix, m.matrix);
      Vector expected;
      int kernel = 0;
      for (double v : base.eigenvalues) {
        if (std::fabs(v) < 1e-8 * radius)
          ++kernel;
        else
          expected.push_back(std::copysign(std::sqrt(v * v + mass * mass), v));
      }
      CHECK(kernel == (1 << n));
      for (int i = 0; i < kernel / 2; ++i) {
        expected.push_back(-mass);
        expected.push_back(mass);
      }
      std::sort(expected.begin(), expected.end());
      REQUIRE(expected.size() == pert.eigenvalues.size());
      for (std::size_t i = 0; i < expected.size(); ++i)
        CHECK(pert.eigenvalues[i] ==
              doctest::Approx(expected[i]).epsilon(1e-8).scale(radius));
    }
  }
}

TEST_CASE("spectrum is symmetric and shifts exactly under constant potential") {
  auto rc = make_complex(1, 5);
  const BlockOperator a = assemble_dirac_form(*rc);
  const BlockOperator m = graded_mass(*rc);
  const EigenSolution base = generalized_symmetric_eig(a.matrix, m.matrix);
  const double radius = std::fabs(base.eigenvalues.back());
  for (std::size_t i = 0; i < base.eigenvalues.size(); ++i) {
    const double v = base.eigenvalues[i];
    const double mirrored = -base.eigenvalues[base.eigenvalues.size() - 1 - i];
    CHECK(v == doctest::Approx(mirrored).epsilon(1e-8).scale(radius));
  }
  const double c = 0.7;
  const BlockOperator cpot =
      potential_term(*rc, [c](const std::array<double, 3>&) { return c; }, 5);
  BlockOperator shifted = a;
  shifted.matrix.add_scaled(cpot.matrix, 1.0);
  const EigenSolution ps = generalized_symmetric_eig(shifted.matrix, m.matrix);
  for (std::size_t i = 0; i < ps.eigenvalues.size(); ++i)
    CHECK(ps.eigenvalues[i] ==
          doctest::Approx(base.eigenvalues[i] + c).epsilon(1e-10).scale(radius));
}

TEST_CASE("1d eigenvalue convergence at the first shell is second order") {
  std::vector<Lattice> lats;
  for (int m : {8, 16, 32}) {
    Lattice lat;
    lat.dim = 1;
    lat.subdivisions = m;
    lats.push_back(lat);
  }
  PerturbationSpec spec;
  const auto reports = eigenvalue_convergence(lats, spec, {kTwoPi, -kTwoPi});
  REQUIRE(reports.size() == 2);
  for (const ConvergenceReport& rep : reports) {
    CHECK(!rep.ambiguous);
    CHECK(rep.oracle_multiplicity == 2);
    CHECK(rep.slope == doctest::Approx(2.0).epsilon(0.1));
    CHECK(rep.rows.back().error < rep.rows.front().error);
  }
}

TEST_CASE("cluster summary groups close eigenvalues") {
  const Vector vals{-2.0, -2.0 + 1e-9, 0.0, 1.0, 1.0 + 1e-9, 1.0 + 2e-9};
  const auto lines = cluster_spectrum(vals, 1e-6);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0].multiplicity == 2);
  CHECK(lines[1].multiplicity == 1);
  CHECK(lines[2].multiplicity == 3);
}

TEST_CASE("inf-sup constant of a definite form on the full space") {
  SplitMix64 rng(5150);
  const std::size_t n = 12;
  const SymmetricMatrix m = random_spd(n, rng);
  // form = row norm = col norm = M: ratio is 1 for every u
  const Matrix basis = Matrix::identity(n);
  CHECK(infsup_constant(m, m, m, basis) == doctest::Approx(1.0).epsilon(1e-10));
  // restricting the basis keeps the constant at 1
  Matrix half(n, 4);
  for (std::size_t j = 0; j < 4; ++j) {
    Vector col(n);
    for (double& v : col) v = rng.normal();
    half.set_col(j, col);
  }
  CHECK(infsup_constant(m, m, m, half) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("inf-sup detects a kernel direction in the trial space") {
  SplitMix64 rng(616);
  const std::size_t n = 10;
  SymmetricMatrix form(n);
  // rank-deficient form: diag(1..1, 0)
  for (std::size_t i = 0; i + 1 < n; ++i) form.lower(i, i) = 1.0;
  const SymmetricMatrix norm = SymmetricMatrix::identity(n);
  const Matrix basis = Matrix::identity(n);
  CHECK(infsup_constant(form, norm, norm, basis) < 1e-12);
  (void)rng;
}
