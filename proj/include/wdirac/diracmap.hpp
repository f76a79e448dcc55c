#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace wdirac {

// Quaternion algebra in its complex 2x2 matrix picture, the frequency-domain
// symbol of the flat Hodge-Dirac operator on (scalar, vector, pseudovector,
// pseudoscalar) tuples, and exact identity checks tying the two together.
// Everything here is finite-dimensional linear algebra; the pinned tolerance
// for the identity checks is 1e-12 because any real deviation is a bug, not a
// discretization error.

using Mat2 = std::array<std::complex<double>, 4>;  // row-major 2x2 complex
using Mat8 = std::array<double, 64>;               // row-major 8x8 real

// ---------------------------------------------------------------------------
// quaternions

// scalar + vector presentation; the matrix image is x0 I + sum_k x[k] J_k
// with the imaginary units J_k = -i sigma_k
struct Quat {
  double x0 = 0.0;
  std::array<double, 3> x{};
};

Mat2 pauli(int k);      // sigma_1, sigma_2, sigma_3 (k is 1-based)
Mat2 quat_unit(int k);  // J_k = -i sigma_k

Mat2 mat2_mul(const Mat2& a, const Mat2& b);
Mat2 mat2_add(const Mat2& a, const Mat2& b);
Mat2 mat2_scale(const Mat2& a, std::complex<double> s);
Mat2 mat2_hermitian(const Mat2& a);  // conjugate transpose
std::complex<double> mat2_trace(const Mat2& a);
double mat2_distance(const Mat2& a, const Mat2& b);  // max abs entry difference

Mat2 quat_matrix(const Quat& q);
// coefficients of m in the {I, J_1, J_2, J_3} basis (the orthogonal
// projection onto the quaternion subspace when m lies outside it)
Quat quat_from_matrix(const Mat2& m);

// (a0 b0 - a.b, a0 b + b0 a + a x b); matches matrix multiplication of images
Quat quat_mul(const Quat& a, const Quat& b);
Quat quat_conj(const Quat& a);                  // (x0, x) -> (x0, -x)
double quat_dot(const Quat& a, const Quat& b);  // x0 y0 + x.y

// ---------------------------------------------------------------------------
// Hodge-Dirac symbol
//
// Component order for 8-vectors and Mat8 is (s, u1,u2,u3, v1,v2,v3, t): the
// proxies of differential form degrees 0..3 on R^3.

struct DiracSymbol {
  std::array<double, 3> xi{};
  Mat8 matrix{};  // real symbol; skew-symmetric, squares to -|xi|^2 I
};

// real frequency matrix of (-div, grad + curl, curl + grad, -div):
// (s, u, v, t) -> (-xi.u, xi s + xi x v, xi x u + xi t, -xi.v).
// The self-adjoint symbol of the operator is i times this matrix; spectrum
// helpers below work with that Hermitian form via a real 16x16 embedding.
DiracSymbol dirac_symbol(const std::array<double, 3>& xi);

// the same matrix assembled the long way round: permute even degrees on top,
// apply the off-diagonal pair of quaternion left-multiplication blocks,
// permute back.  Agrees with dirac_symbol entry for entry.
Mat8 rearranged_symbol(const std::array<double, 3>& xi);

Mat8 almost_complex_structure();  // (s,u,v,t) -> (-t, v, -u, s); squares to -I
Mat8 degree_parity();             // +1 on even-degree slots, -1 on odd

Mat8 mat8_mul(const Mat8& a, const Mat8& b);
std::array<double, 8> mat8_apply(const Mat8& a, const std::array<double, 8>& w);
double mat8_distance(const Mat8& a, const Mat8& b);

// eigenvalues (ascending, all 8) of the self-adjoint symbol
// i * sym.matrix + mass * degree_parity(): +-sqrt(|xi|^2 + mass^2), four each
std::vector<double> symbol_spectrum(const DiracSymbol& sym, double mass = 0.0);

// ---------------------------------------------------------------------------
// conjugation transport
//
// (s,u,v,t) -> (s + v.J) + i (t + u.J): even degrees land in the quaternion
// subspace of C^{2x2}, odd degrees in its i-multiple.  Under this packing the
// symbol becomes left Pauli multiplication composed with quaternion
// conjugation, and the almost complex structure becomes multiplication by i.

Mat2 form_to_matrix(const std::array<double, 8>& w);
std::array<double, 8> matrix_to_form(const Mat2& m);

// sigma_2 conj(m) sigma_2: the antilinear involution fixing the quaternion
// subspace and negating its i-multiple
Mat2 quaternion_conjugation(const Mat2& m);

Mat2 pauli_dot(const std::array<double, 3>& xi);  // sum_k xi[k] sigma_k

// ---------------------------------------------------------------------------
// identity check reports

struct IdentityCheck {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct AlgebraReport {
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<IdentityCheck> checks;
  double max_deviation = 0.0;
  bool pass = false;  // every check passed
};

// product, conjugation, trace-pairing and roundtrip identities between the
// tuple picture and the matrix picture, on canonical elements plus `trials`
// random pairs
AlgebraReport check_quaternion_algebra(std::uint64_t seed, int trials);

// skewness, square, rearranged assembly, almost complex structure, parity
// mass term, spectrum and conjugation transport, on canonical frequencies
// plus `trials` random ones
AlgebraReport check_symbol_identities(std::uint64_t seed, int trials);

// ---------------------------------------------------------------------------
// bridge to the torus oracle

struct BridgeReport {
  std::array<int, 3> mode{};
  std::array<double, 3> lengths{};
  double mass = 0.0;
  double frequency_norm = 0.0;             // |2 pi mode / L|
  std::vector<double> symbol_eigenvalues;  // 8, ascending
  std::vector<double> mode_eigenvalues;    // 8, ascending: the oracle's share
                                           // for one real frequency vector
  double max_deviation = 0.0;              // elementwise gap of the two lists
  long long shell_multiplicity = 0;        // oracle multiplicity at the value
  bool pass = false;
};

// checks that the symbol spectrum at xi = 2 pi mode / L reproduces the
// per-mode eigenvalues of the continuous torus oracle in dimension 3: the
// values +-sqrt(|xi|^2 + mass^2) with multiplicity four, present in the
// oracle's line list with a multiplicity counting 4 per lattice vector in
// the shell
BridgeReport oracle_bridge(const std::array<int, 3>& mode, const std::array<double, 3>& lengths,
                           double mass = 0.0);

}  // namespace wdirac
