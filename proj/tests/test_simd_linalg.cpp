#include <doctest.h>

#include <cmath>
#include <random>

#include "wdirac/linalg.hpp"
#include "wdirac/simd.hpp"

using namespace wdirac;

namespace {

Vector random_vec(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector v(n);
  for (double& x : v) x = u(rng);
  return v;
}

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

SymmetricMatrix random_spd(std::mt19937_64& rng, std::size_t n) {
  Matrix a = random_matrix(rng, n, n);
  Matrix ata = transpose(a) * a;
  for (std::size_t i = 0; i < n; ++i) ata(i, i) += double(n);
  return SymmetricMatrix::from_full(ata, 1e-12);
}

struct IsaGuard {
  ~IsaGuard() { simd::force(simd::cpu_has_avx2() ? simd::Isa::avx2 : simd::Isa::scalar); }
};

}  // namespace

TEST_CASE("simd kernels match scalar references") {
  if (!simd::cpu_has_avx2()) {
    MESSAGE("avx2 not available, dispatch stays scalar");
    return;
  }
  IsaGuard guard;
  std::mt19937_64 rng(7);
  for (std::size_t n : {std::size_t(1), std::size_t(5), std::size_t(64), std::size_t(1001)}) {
    Vector x = random_vec(rng, n), y = random_vec(rng, n);

    const double want_dot = simd::ref::dot(x.data(), y.data(), n);
    simd::force(simd::Isa::avx2);
    CHECK(simd::active() == simd::Isa::avx2);
    const double got_dot = simd::dot(x.data(), y.data(), n);
    CHECK(std::fabs(got_dot - want_dot) <= 1e-13 * (1.0 + std::fabs(want_dot) + double(n)));

    Vector y1 = y, y2 = y;
    simd::ref::axpy(0.37, x.data(), y1.data(), n);
    simd::axpy(0.37, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(y1[i] - y2[i]) <= 1e-14);

    Vector a1 = x, b1 = y, a2 = x, b2 = y;
    const double c = std::cos(0.3), s = std::sin(0.3);
    simd::ref::rot2(a1.data(), b1.data(), c, s, n);
    simd::rot2(a2.data(), b2.data(), c, s, n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::fabs(a1[i] - a2[i]) <= 1e-14);
      CHECK(std::fabs(b1[i] - b2[i]) <= 1e-14);
    }

    const double ss1 = simd::ref::sum_sq(x.data(), n);
    const double ss2 = simd::sum_sq(x.data(), n);
    CHECK(std::fabs(ss1 - ss2) <= 1e-13 * (1.0 + ss1));
  }
}

TEST_CASE("forced scalar dispatch is honored") {
  IsaGuard guard;
  simd::force(simd::Isa::scalar);
  CHECK(simd::active() == simd::Isa::scalar);
  Vector x{1, 2, 3}, y{4, 5, 6};
  CHECK(simd::dot(x.data(), y.data(), 3) == doctest::Approx(32.0));
}

TEST_CASE("cholesky factors and solves") {
  std::mt19937_64 rng(11);
  auto a = random_spd(rng, 40);
  auto chol = cholesky(a);
  Vector x = random_vec(rng, 40);
  Vector b = matvec(a, x);
  Vector got = chol.solve(b);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(got[i] == doctest::Approx(x[i]).epsilon(1e-9));

  SymmetricMatrix bad(3);
  bad.lower(0, 0) = 1.0;
  bad.lower(1, 1) = -2.0;
  bad.lower(2, 2) = 1.0;
  CHECK_THROWS_AS(cholesky(bad), NumericalFailure);
}

TEST_CASE("lu solves and detects singularity") {
  std::mt19937_64 rng(13);
  Matrix a = random_matrix(rng, 25, 25);
  for (std::size_t i = 0; i < 25; ++i) a(i, i) += 5.0;
  auto f = lu_factor(a);
  Vector x = random_vec(rng, 25);
  Vector got = f.solve(matvec(a, x));
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(got[i] == doctest::Approx(x[i]).epsilon(1e-9));

  Matrix sing(2, 2);
  sing(0, 0) = 1.0;
  sing(0, 1) = 2.0;
  sing(1, 0) = 2.0;
  sing(1, 1) = 4.0;
  CHECK_THROWS_AS(lu_factor(sing), NumericalFailure);
}

TEST_CASE("jacobi svd reproduces the matrix and finds rank") {
  std::mt19937_64 rng(17);
  Matrix a = random_matrix(rng, 12, 8);
  // make the last two columns dependent
  for (std::size_t i = 0; i < 12; ++i) {
    a(i, 6) = 2.0 * a(i, 0) - a(i, 1);
    a(i, 7) = a(i, 2);
  }
  auto svd = jacobi_svd(a);
  CHECK(svd.rank(1e-10) == 6);
  // reconstruct
  Matrix s(8, 8);
  for (std::size_t i = 0; i < 8; ++i) s(i, i) = svd.sigma[i];
  Matrix rec = svd.u * s * transpose(svd.v);
  CHECK(max_abs(rec - a) < 1e-10);
  // orthonormal v
  Matrix vtv = transpose(svd.v) * svd.v;
  CHECK(max_abs(vtv - Matrix::identity(8)) < 1e-12);
}

TEST_CASE("sparse matrices: assembly, matvec, transpose, duplicates") {
  std::vector<Triplet> t{{0, 0, 1.0}, {0, 0, 2.0}, {1, 2, -1.0}, {2, 1, 4.0}};
  auto s = SparseMatrix::from_triplets(3, 3, t);
  CHECK(s.nnz() == 3);  // duplicate merged
  Vector x{1, 1, 1};
  Vector y = s.matvec(x);
  CHECK(y[0] == doctest::Approx(3.0));
  CHECK(y[1] == doctest::Approx(-1.0));
  CHECK(y[2] == doctest::Approx(4.0));
  Vector yt = s.tmatvec(x);
  CHECK(yt[0] == doctest::Approx(3.0));
  CHECK(yt[1] == doctest::Approx(4.0));
  CHECK(yt[2] == doctest::Approx(-1.0));
  auto d = s.transpose().to_dense();
  CHECK(d(2, 1) == doctest::Approx(-1.0));
}

TEST_CASE("integer sparse product is exact") {
  std::vector<IntTriplet> ta{{0, 0, 2}, {0, 1, -3}, {1, 1, 5}};
  std::vector<IntTriplet> tb{{0, 0, 7}, {1, 0, -1}};
  auto a = SparseIntMatrix::from_triplets(2, 2, std::move(ta));
  auto b = SparseIntMatrix::from_triplets(2, 1, std::move(tb));
  auto c = multiply(a, b);
  std::vector<std::int64_t> one{1};
  auto y = c.matvec(one);
  CHECK(y[0] == 17);
  CHECK(y[1] == -5);
}

TEST_CASE("conjugate gradients on an spd system") {
  std::mt19937_64 rng(23);
  auto a = random_spd(rng, 30);
  Vector x_true = random_vec(rng, 30);
  Vector b = matvec(a, x_true);
  Vector x;
  const int iters = cg_solve([&](const Vector& in, Vector& out) { out = matvec(a, in); }, b, x,
                             1e-12, 1000);
  CHECK(iters <= 1000);
  for (std::size_t i = 0; i < 30; ++i) CHECK(x[i] == doctest::Approx(x_true[i]).epsilon(1e-7));
}

TEST_CASE("symmetric storage reads both triangles") {
  SymmetricMatrix s(3);
  s.lower(2, 1) = 4.5;
  CHECK(s(1, 2) == 4.5);
  CHECK(s(2, 1) == 4.5);
  Matrix f = s.full();
  CHECK(f(1, 2) == 4.5);
}
