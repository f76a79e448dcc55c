#include "wdirac/diracmap.hpp"

#include <algorithm>
#include <cmath>

#include "wdirac/linalg.hpp"
#include "wdirac/rng.hpp"
#include "wdirac/spectra.hpp"

namespace wdirac {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kIdentityTol = 1e-12;
// eigensolver-backed checks inherit iteration roundoff on top of the algebra
constexpr double kSolverTol = 1e-10;

using Complex = std::complex<double>;

}  // namespace

// ---------------------------------------------------------------------------
// quaternions

Mat2 pauli(int k) {
  require(k >= 1 && k <= 3, "pauli: index must be 1..3");
  const Complex i(0.0, 1.0);
  switch (k) {
    case 1:
      return {Complex(0.0), Complex(1.0), Complex(1.0), Complex(0.0)};
    case 2:
      return {Complex(0.0), -i, i, Complex(0.0)};
    default:
      return {Complex(1.0), Complex(0.0), Complex(0.0), Complex(-1.0)};
  }
}

Mat2 quat_unit(int k) { return mat2_scale(pauli(k), Complex(0.0, -1.0)); }

Mat2 mat2_mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

Mat2 mat2_add(const Mat2& a, const Mat2& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}

Mat2 mat2_scale(const Mat2& a, Complex s) { return {s * a[0], s * a[1], s * a[2], s * a[3]}; }

Mat2 mat2_hermitian(const Mat2& a) {
  return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])};
}

Complex mat2_trace(const Mat2& a) { return a[0] + a[3]; }

double mat2_distance(const Mat2& a, const Mat2& b) {
  double d = 0.0;
  for (int p = 0; p < 4; ++p) d = std::max(d, std::abs(a[p] - b[p]));
  return d;
}

Mat2 quat_matrix(const Quat& q) {
  Mat2 m{Complex(q.x0), Complex(0.0), Complex(0.0), Complex(q.x0)};
  for (int k = 0; k < 3; ++k) m = mat2_add(m, mat2_scale(quat_unit(k + 1), Complex(q.x[k])));
  return m;
}

Quat quat_from_matrix(const Mat2& m) {
  // {I, J_1, J_2, J_3} is orthonormal for the half trace pairing
  Quat q;
  q.x0 = 0.5 * std::real(mat2_trace(m));
  for (int k = 0; k < 3; ++k) {
    const Mat2 p = mat2_mul(mat2_hermitian(quat_unit(k + 1)), m);
    q.x[k] = 0.5 * std::real(mat2_trace(p));
  }
  return q;
}

Quat quat_mul(const Quat& a, const Quat& b) {
  Quat r;
  r.x0 = a.x0 * b.x0 - (a.x[0] * b.x[0] + a.x[1] * b.x[1] + a.x[2] * b.x[2]);
  for (int k = 0; k < 3; ++k) r.x[k] = a.x0 * b.x[k] + b.x0 * a.x[k];
  r.x[0] += a.x[1] * b.x[2] - a.x[2] * b.x[1];
  r.x[1] += a.x[2] * b.x[0] - a.x[0] * b.x[2];
  r.x[2] += a.x[0] * b.x[1] - a.x[1] * b.x[0];
  return r;
}

Quat quat_conj(const Quat& a) { return {a.x0, {-a.x[0], -a.x[1], -a.x[2]}}; }

double quat_dot(const Quat& a, const Quat& b) {
  return a.x0 * b.x0 + a.x[0] * b.x[0] + a.x[1] * b.x[1] + a.x[2] * b.x[2];
}

// ---------------------------------------------------------------------------
// symbol

namespace {

// cross[i][k] so that (xi x g)_i = sum_k cross[i][k] g[k]
std::array<std::array<double, 3>, 3> cross_matrix(const std::array<double, 3>& xi) {
  return {{{0.0, -xi[2], xi[1]}, {xi[2], 0.0, -xi[0]}, {-xi[1], xi[0], 0.0}}};
}

}  // namespace

DiracSymbol dirac_symbol(const std::array<double, 3>& xi) {
  for (double c : xi) require(std::isfinite(c), "dirac_symbol: frequency must be finite");
  DiracSymbol sym;
  sym.xi = xi;
  Mat8& k = sym.matrix;
  k.fill(0.0);
  const auto cr = cross_matrix(xi);
  for (int a = 0; a < 3; ++a) {
    k[std::size_t(0 * 8 + 1 + a)] = -xi[a];       // -xi . u
    k[std::size_t((1 + a) * 8 + 0)] = xi[a];      // xi s
    k[std::size_t((4 + a) * 8 + 7)] = xi[a];      // xi t
    k[std::size_t(7 * 8 + 4 + a)] = -xi[a];       // -xi . v
    for (int b = 0; b < 3; ++b) {
      k[std::size_t((1 + a) * 8 + 4 + b)] = cr[std::size_t(a)][std::size_t(b)];  // xi x v
      k[std::size_t((4 + a) * 8 + 1 + b)] = cr[std::size_t(a)][std::size_t(b)];  // xi x u
    }
  }
  return sym;
}

Mat8 rearranged_symbol(const std::array<double, 3>& xi) {
  // 4x4 block: left multiplication by the pure quaternion (0, xi) on (f, g)
  std::array<double, 16> blk{};
  const auto cr = cross_matrix(xi);
  for (int a = 0; a < 3; ++a) {
    blk[std::size_t(0 * 4 + 1 + a)] = -xi[a];
    blk[std::size_t((1 + a) * 4 + 0)] = xi[a];
    for (int b = 0; b < 3; ++b)
      blk[std::size_t((1 + a) * 4 + 1 + b)] = cr[std::size_t(a)][std::size_t(b)];
  }

  // permutation sending (s, u, v, t) to even degrees on top: (s, v, t, u)
  std::array<int, 8> perm{0, 4, 5, 6, 7, 1, 2, 3};

  Mat8 theta{};
  for (int r = 0; r < 8; ++r) theta[std::size_t(r * 8 + perm[std::size_t(r)])] = 1.0;

  Mat8 blocked{};  // [[0, B], [B, 0]] in the permuted layout
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      blocked[std::size_t(r * 8 + 4 + c)] = blk[std::size_t(r * 4 + c)];
      blocked[std::size_t((4 + r) * 8 + c)] = blk[std::size_t(r * 4 + c)];
    }

  Mat8 theta_t{};
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) theta_t[std::size_t(r * 8 + c)] = theta[std::size_t(c * 8 + r)];
  return mat8_mul(theta_t, mat8_mul(blocked, theta));
}

Mat8 almost_complex_structure() {
  Mat8 j{};
  j[0 * 8 + 7] = -1.0;
  for (int a = 0; a < 3; ++a) {
    j[std::size_t((1 + a) * 8 + 4 + a)] = 1.0;
    j[std::size_t((4 + a) * 8 + 1 + a)] = -1.0;
  }
  j[7 * 8 + 0] = 1.0;
  return j;
}

Mat8 degree_parity() {
  Mat8 p{};
  const std::array<double, 8> sign{1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, -1.0};
  for (int r = 0; r < 8; ++r) p[std::size_t(r * 8 + r)] = sign[std::size_t(r)];
  return p;
}

Mat8 mat8_mul(const Mat8& a, const Mat8& b) {
  Mat8 r{};
  for (int i = 0; i < 8; ++i)
    for (int k = 0; k < 8; ++k) {
      const double aik = a[std::size_t(i * 8 + k)];
      if (aik == 0.0) continue;
      for (int j = 0; j < 8; ++j) r[std::size_t(i * 8 + j)] += aik * b[std::size_t(k * 8 + j)];
    }
  return r;
}

std::array<double, 8> mat8_apply(const Mat8& a, const std::array<double, 8>& w) {
  std::array<double, 8> r{};
  for (int i = 0; i < 8; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 8; ++j) acc += a[std::size_t(i * 8 + j)] * w[std::size_t(j)];
    r[std::size_t(i)] = acc;
  }
  return r;
}

double mat8_distance(const Mat8& a, const Mat8& b) {
  double d = 0.0;
  for (int p = 0; p < 64; ++p) d = std::max(d, std::abs(a[std::size_t(p)] - b[std::size_t(p)]));
  return d;
}

namespace {

// real 16x16 embedding of the Hermitian matrix i K + mass P: [[mP, -K], [K, mP]].
// Eigenvalues come out doubled.
SymmetricMatrix hermitian_embedding(const Mat8& k, double mass) {
  SymmetricMatrix e(16);
  const Mat8 par = degree_parity();
  for (std::size_t i = 0; i < 8; ++i) {
    e.lower(i, i) = mass * par[i * 8 + i];
    e.lower(8 + i, 8 + i) = mass * par[i * 8 + i];
  }
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c) e.lower(8 + r, c) = k[r * 8 + c];
  return e;
}

}  // namespace

std::vector<double> symbol_spectrum(const DiracSymbol& sym, double mass) {
  require(std::isfinite(mass), "symbol_spectrum: mass must be finite");
  const EigenSolution sol = sym_eig(hermitian_embedding(sym.matrix, mass));
  double scale = 0.0;
  for (double v : sol.eigenvalues) scale = std::max(scale, std::abs(v));
  std::vector<double> out(8, 0.0);
  for (std::size_t i = 0; i < 8; ++i) {
    const double a = sol.eigenvalues[2 * i];
    const double b = sol.eigenvalues[2 * i + 1];
    if (std::abs(a - b) > 1e-9 * (1.0 + scale))
      throw NumericalFailure("symbol_spectrum: embedding eigenvalues failed to pair");
    out[i] = 0.5 * (a + b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// conjugation transport

Mat2 form_to_matrix(const std::array<double, 8>& w) {
  const Quat even{w[0], {w[4], w[5], w[6]}};
  const Quat odd{w[7], {w[1], w[2], w[3]}};
  return mat2_add(quat_matrix(even), mat2_scale(quat_matrix(odd), Complex(0.0, 1.0)));
}

std::array<double, 8> matrix_to_form(const Mat2& m) {
  // split into the quaternion subspace and its i-multiple, then unpack:
  // for M = P + iQ with P, Q quaternionic, P = (M + C(M))/2 and
  // Q = -i (M - C(M))/2
  Mat2 real_part{};
  Mat2 imag_part{};
  const Mat2 c = quaternion_conjugation(m);
  for (int p = 0; p < 4; ++p) {
    real_part[std::size_t(p)] = 0.5 * (m[std::size_t(p)] + c[std::size_t(p)]);
    imag_part[std::size_t(p)] = Complex(0.0, -0.5) * (m[std::size_t(p)] - c[std::size_t(p)]);
  }
  const Quat even = quat_from_matrix(real_part);
  const Quat odd = quat_from_matrix(imag_part);
  return {even.x0, odd.x[0], odd.x[1], odd.x[2], even.x[0], even.x[1], even.x[2], odd.x0};
}

Mat2 quaternion_conjugation(const Mat2& m) {
  const Mat2 conj{std::conj(m[0]), std::conj(m[1]), std::conj(m[2]), std::conj(m[3])};
  const Mat2 s2 = pauli(2);
  return mat2_mul(s2, mat2_mul(conj, s2));
}

Mat2 pauli_dot(const std::array<double, 3>& xi) {
  Mat2 m{};
  for (int k = 0; k < 3; ++k) m = mat2_add(m, mat2_scale(pauli(k + 1), Complex(xi[k])));
  return m;
}

// ---------------------------------------------------------------------------
// checks

namespace {

void record(AlgebraReport& rep, const char* name, double dev, double tol) {
  rep.checks.push_back({name, dev, tol, dev <= tol});
}

void finalize(AlgebraReport& rep) {
  rep.max_deviation = 0.0;
  rep.pass = true;
  for (const IdentityCheck& c : rep.checks) {
    rep.max_deviation = std::max(rep.max_deviation, c.deviation);
    rep.pass = rep.pass && c.pass;
  }
}

Quat random_quat(SplitMix64& rng) {
  return {rng.normal(), {rng.normal(), rng.normal(), rng.normal()}};
}

double quat_difference(const Quat& a, const Quat& b) {
  double d = std::abs(a.x0 - b.x0);
  for (int k = 0; k < 3; ++k) d = std::max(d, std::abs(a.x[k] - b.x[k]));
  return d;
}

}  // namespace

AlgebraReport check_quaternion_algebra(std::uint64_t seed, int trials) {
  require(trials >= 1, "check_quaternion_algebra: need at least one trial");
  AlgebraReport rep;
  rep.seed = seed;
  rep.trials = trials;
  SplitMix64 rng(seed);

  // cross product table of the imaginary units, in both pictures
  double dev_units = 0.0;
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) {
      const Mat2 lhs = mat2_mul(quat_unit(a), quat_unit(b));
      Quat qa;
      qa.x[std::size_t(a - 1)] = 1.0;
      Quat qb;
      qb.x[std::size_t(b - 1)] = 1.0;
      const Mat2 rhs = quat_matrix(quat_mul(qa, qb));
      dev_units = std::max(dev_units, mat2_distance(lhs, rhs));
    }
  // J_1 J_2 = J_3 specifically
  dev_units = std::max(dev_units,
                       mat2_distance(mat2_mul(quat_unit(1), quat_unit(2)), quat_unit(3)));

  double dev_unit_elem = 0.0;
  double dev_product = 0.0;
  double dev_conj = 0.0;
  double dev_euclid = 0.0;
  double dev_round = 0.0;
  double dev_det = 0.0;
  const Quat one{1.0, {0.0, 0.0, 0.0}};
  for (int t = 0; t < trials; ++t) {
    const Quat a = random_quat(rng);
    const Quat b = random_quat(rng);
    dev_unit_elem = std::max(dev_unit_elem, quat_difference(quat_mul(one, b), b));
    dev_unit_elem = std::max(dev_unit_elem, quat_difference(quat_mul(a, one), a));
    const Mat2 ma = quat_matrix(a);
    const Mat2 mb = quat_matrix(b);
    dev_product = std::max(dev_product,
                           mat2_distance(quat_matrix(quat_mul(a, b)), mat2_mul(ma, mb)));
    dev_conj = std::max(dev_conj, mat2_distance(quat_matrix(quat_conj(a)), mat2_hermitian(ma)));
    const Complex pair = mat2_trace(mat2_mul(mat2_hermitian(ma), mb));
    dev_euclid = std::max(dev_euclid, std::abs(0.5 * pair - Complex(quat_dot(a, b))));
    dev_round = std::max(dev_round, quat_difference(quat_from_matrix(ma), a));
    const Complex det = ma[0] * ma[3] - ma[1] * ma[2];
    dev_det = std::max(dev_det, std::abs(det - Complex(quat_dot(a, a))));
  }

  record(rep, "imaginary units follow the cross product table", dev_units, kIdentityTol);
  record(rep, "unit element multiplies trivially", dev_unit_elem, kIdentityTol);
  record(rep, "matrix image preserves products", dev_product, kIdentityTol);
  record(rep, "conjugation is hermitian transpose", dev_conj, kIdentityTol);
  record(rep, "euclidean product is the half trace pairing", dev_euclid, kIdentityTol);
  record(rep, "matrix roundtrip recovers coefficients", dev_round, kIdentityTol);
  record(rep, "determinant is the squared norm", dev_det, kIdentityTol);
  finalize(rep);
  return rep;
}

AlgebraReport check_symbol_identities(std::uint64_t seed, int trials) {
  require(trials >= 1, "check_symbol_identities: need at least one trial");
  AlgebraReport rep;
  rep.seed = seed;
  rep.trials = trials;
  SplitMix64 rng(seed);

  const Mat8 jmat = almost_complex_structure();
  const Mat8 par = degree_parity();

  Mat8 minus_id{};
  Mat8 id{};
  for (int r = 0; r < 8; ++r) {
    minus_id[std::size_t(r * 8 + r)] = -1.0;
    id[std::size_t(r * 8 + r)] = 1.0;
  }
  const double dev_j_sq = mat8_distance(mat8_mul(jmat, jmat), minus_id);
  const double dev_p_sq = mat8_distance(mat8_mul(par, par), id);

  std::vector<std::array<double, 3>> samples = {
      {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}};
  for (int t = 0; t < trials; ++t)
    samples.push_back({rng.normal(), rng.normal(), rng.normal()});

  const std::array<double, 3> masses{0.5, 1.0, 3.0};

  double dev_skew = 0.0;
  double dev_square = 0.0;
  double dev_rearranged = 0.0;
  double dev_j_anti = 0.0;
  double dev_p_anti = 0.0;
  double dev_mass = 0.0;
  double dev_spectrum = 0.0;
  double dev_pairing = 0.0;
  double dev_transport = 0.0;
  double dev_j_transport = 0.0;
  double dev_packing = 0.0;

  for (const auto& xi : samples) {
    const DiracSymbol sym = dirac_symbol(xi);
    const Mat8& k = sym.matrix;
    const double nsq = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];

    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c)
        dev_skew = std::max(dev_skew, std::abs(k[std::size_t(r * 8 + c)] +
                                               k[std::size_t(c * 8 + r)]));

    Mat8 target{};
    for (int r = 0; r < 8; ++r) target[std::size_t(r * 8 + r)] = -nsq;
    dev_square = std::max(dev_square, mat8_distance(mat8_mul(k, k), target));

    dev_rearranged = std::max(dev_rearranged, mat8_distance(rearranged_symbol(xi), k));

    Mat8 anti = mat8_mul(k, jmat);
    const Mat8 jk = mat8_mul(jmat, k);
    for (int p = 0; p < 64; ++p) anti[std::size_t(p)] += jk[std::size_t(p)];
    dev_j_anti = std::max(dev_j_anti, mat8_distance(anti, Mat8{}));

    Mat8 panti = mat8_mul(k, par);
    const Mat8 pk = mat8_mul(par, k);
    for (int p = 0; p < 64; ++p) panti[std::size_t(p)] += pk[std::size_t(p)];
    dev_p_anti = std::max(dev_p_anti, mat8_distance(panti, Mat8{}));

    // (i K + m P)^2 = (|xi|^2 + m^2) I, through the real embedding
    for (double m : masses) {
      const Matrix e = hermitian_embedding(k, m).full();
      const Matrix esq = e * e;
      double dev = 0.0;
      for (std::size_t r = 0; r < 16; ++r)
        for (std::size_t c = 0; c < 16; ++c) {
          const double want = r == c ? nsq + m * m : 0.0;
          dev = std::max(dev, std::abs(esq(r, c) - want));
        }
      dev_mass = std::max(dev_mass, dev);
    }

    const double norm = std::sqrt(nsq);
    const std::vector<double> spec = symbol_spectrum(sym, 0.0);
    for (std::size_t i = 0; i < 8; ++i) {
      const double want = i < 4 ? -norm : norm;
      dev_spectrum = std::max(dev_spectrum, std::abs(spec[i] - want));
    }
    const std::vector<double> spec_m = symbol_spectrum(sym, 1.0);
    const double lam = std::sqrt(nsq + 1.0);
    for (std::size_t i = 0; i < 8; ++i) {
      const double want = i < 4 ? -lam : lam;
      dev_spectrum = std::max(dev_spectrum, std::abs(spec_m[i] - want));
    }

    // J sends lambda eigenvectors to -lambda eigenvectors of the embedding
    {
      const SymmetricMatrix e = hermitian_embedding(k, 1.0);
      const EigenSolution sol = sym_eig(e);
      for (std::size_t i = 0; i < 16; ++i) {
        const Vector& x = sol.eigenvectors[i];
        Vector jx(16, 0.0);
        for (std::size_t r = 0; r < 8; ++r)
          for (std::size_t c = 0; c < 8; ++c) {
            jx[r] += jmat[r * 8 + c] * x[c];
            jx[8 + r] += jmat[r * 8 + c] * x[8 + c];
          }
        Vector res = matvec(e, jx);
        axpy_inplace(sol.eigenvalues[i], jx, res);
        dev_pairing = std::max(dev_pairing, norm2(res) / (1.0 + std::abs(sol.eigenvalues[i])));
      }
    }

    // conjugation transport on one random tuple plus the basis tuples
    std::vector<std::array<double, 8>> tuples;
    for (int b = 0; b < 8; ++b) {
      std::array<double, 8> w{};
      w[std::size_t(b)] = 1.0;
      tuples.push_back(w);
    }
    std::array<double, 8> w{};
    for (int b = 0; b < 8; ++b) w[std::size_t(b)] = rng.normal();
    tuples.push_back(w);
    const Mat2 sig = pauli_dot(xi);
    for (const auto& tup : tuples) {
      const Mat2 lhs = form_to_matrix(mat8_apply(k, tup));
      const Mat2 rhs = mat2_mul(sig, quaternion_conjugation(form_to_matrix(tup)));
      dev_transport = std::max(dev_transport, mat2_distance(lhs, rhs));

      const Mat2 jlhs = form_to_matrix(mat8_apply(jmat, tup));
      const Mat2 jrhs = mat2_scale(form_to_matrix(tup), Complex(0.0, 1.0));
      dev_j_transport = std::max(dev_j_transport, mat2_distance(jlhs, jrhs));

      // packing is an isometry and inverts exactly
      const Mat2 m = form_to_matrix(tup);
      double fro = 0.0;
      for (int p = 0; p < 4; ++p) fro += std::norm(m[std::size_t(p)]);
      double wsq = 0.0;
      for (int b = 0; b < 8; ++b) wsq += tup[std::size_t(b)] * tup[std::size_t(b)];
      dev_packing = std::max(dev_packing, std::abs(0.5 * fro - wsq));
      const std::array<double, 8> back = matrix_to_form(m);
      for (int b = 0; b < 8; ++b)
        dev_packing = std::max(dev_packing, std::abs(back[std::size_t(b)] - tup[std::size_t(b)]));
    }
  }

  record(rep, "symbol matrix is skew", dev_skew, kIdentityTol);
  record(rep, "symbol squares to minus the frequency norm", dev_square, kIdentityTol);
  record(rep, "rearranged assembly matches the block formula", dev_rearranged, kIdentityTol);
  record(rep, "almost complex structure squares to minus one", dev_j_sq, kIdentityTol);
  record(rep, "almost complex structure anticommutes with the symbol", dev_j_anti, kIdentityTol);
  record(rep, "degree parity squares to one", dev_p_sq, kIdentityTol);
  record(rep, "degree parity anticommutes with the symbol", dev_p_anti, kIdentityTol);
  record(rep, "mass term squares to the shifted norm", dev_mass, kIdentityTol);
  record(rep, "spectrum is plus minus the frequency magnitude", dev_spectrum, kSolverTol);
  record(rep, "almost complex structure pairs eigenvectors", dev_pairing, kSolverTol);
  record(rep, "conjugation transports the symbol to pauli multiplication", dev_transport,
         kIdentityTol);
  record(rep, "packing turns the almost complex structure into i", dev_j_transport, kIdentityTol);
  record(rep, "packing is an isometry with exact inverse", dev_packing, kIdentityTol);
  finalize(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// bridge

BridgeReport oracle_bridge(const std::array<int, 3>& mode, const std::array<double, 3>& lengths,
                           double mass) {
  require(mass >= 0.0 && std::isfinite(mass), "oracle_bridge: mass must be finite and >= 0");
  for (double l : lengths) require(l > 0.0, "oracle_bridge: lengths must be positive");

  BridgeReport rep;
  rep.mode = mode;
  rep.lengths = lengths;
  rep.mass = mass;

  std::array<double, 3> xi{};
  for (int a = 0; a < 3; ++a) xi[std::size_t(a)] = kTwoPi * mode[std::size_t(a)] / lengths[std::size_t(a)];
  const double r = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
  rep.frequency_norm = r;

  rep.symbol_eigenvalues = symbol_spectrum(dirac_symbol(xi), mass);

  const double lam = std::sqrt(r * r + mass * mass);
  rep.mode_eigenvalues.assign(4, -lam);
  rep.mode_eigenvalues.insert(rep.mode_eigenvalues.end(), 4, lam);

  rep.max_deviation = 0.0;
  for (std::size_t i = 0; i < 8; ++i)
    rep.max_deviation =
        std::max(rep.max_deviation, std::abs(rep.symbol_eigenvalues[i] - rep.mode_eigenvalues[i]));

  // tie to the continuous oracle: the claimed values must appear in its line
  // list with a multiplicity counting four per lattice vector in the shell
  double lmax = 0.0;
  for (double l : lengths) lmax = std::max(lmax, l);
  const double cutoff = r > 0.0 ? r * (1.0 + 1e-9) : kTwoPi / (2.0 * lmax);
  const OracleSpectrum oracle = torus_dirac_oracle(3, lengths, mass, cutoff);

  long long plus_mult = 0;
  long long minus_mult = 0;
  for (const SpectrumLine& line : oracle.lines) {
    if (std::abs(line.value - lam) <= 1e-9 * (1.0 + lam)) plus_mult += line.multiplicity;
    if (lam > 0.0 && std::abs(line.value + lam) <= 1e-9 * (1.0 + lam))
      minus_mult += line.multiplicity;
  }

  bool oracle_ok = false;
  if (r == 0.0 && mass == 0.0) {
    // kernel line: dimension 2^3 on the 3-torus
    oracle_ok = plus_mult == 8;
    rep.shell_multiplicity = plus_mult;
  } else {
    oracle_ok = plus_mult > 0 && plus_mult % 4 == 0 && plus_mult == minus_mult;
    rep.shell_multiplicity = plus_mult;
  }

  rep.pass = oracle_ok && rep.max_deviation <= 1e-10;
  return rep;
}

}  // namespace wdirac
