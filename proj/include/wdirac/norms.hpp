#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wdirac/hodge.hpp"
#include "wdirac/whitney.hpp"

namespace wdirac {

// Seminorms on Whitney cochains: the broken H1 norm with facet jumps, the
// domain seminorm built from the coboundary and its weak adjoint, and the
// fractional Slobodetskij seminorm with an explicit truncation bar. On top
// of these, ratio experiments that measure the equivalence and inverse
// inequality constants as h shrinks.

// Broken H1-plus-jump seminorm of the Whitney representative:
//
//   value^2 = sum_cells  int_T |grad u|^2
//           + sum_facets h^{-1} int_F |jump of u across F|^2
//
// Component gradients are constant per cell (the representative is affine),
// so the volume term is exact. The jump takes the full component vector of
// the representative, not only tangential traces; h is the diameter of the
// facet's plus-side cell. Reports quoting this seminorm record that
// convention.
double broken_h1_jump(const DeRhamComplex& rc, const Cochain& u);

// Graded version: square root of the sum of squares over all degrees.
double broken_h1_jump(const DeRhamComplex& rc, const GradedCochain& u);

// Domain seminorm  [u]^2 = sum_k |d u_k|^2 + |weak codifferential of u_k|^2.
// The sup characterization sup_v <u_k, d v> / |v| is attained at the weak
// codifferential, so this computes the sup form exactly.
double domain_seminorm(const DeRhamComplex& rc, const GradedCochain& u);

// Gram matrix of the squared domain seminorm over flattened graded
// coefficients: block diagonal per degree, each block
// D^T M_up D + (M_down^{-1} D_down^T M)^T M_down (M_down^{-1} D_down^T M)
// assembled through dense Cholesky solves with the down-degree mass.
SymmetricMatrix domain_seminorm_gram(const DeRhamComplex& rc);

struct SlobodetskijSpec {
  double s = 0.3;     // fractional order, must lie in (0, 1/2)
  int quad_order = 4; // Gauss order per simplex factor of a cell pair
  int levels = 4;     // subdivision depth toward the diagonal, ratio 1/2
  // Cost gate: the pair loop is O(#cells^2), so meshes with more than this
  // many cell pairs are rejected. The default admits every 1d mesh used by
  // the experiments and 2d meshes up to 8 subdivisions per axis.
  std::size_t max_cell_pairs = 20000;
};

// Value with a one-sided truncation bound. The hierarchical quadrature omits
// the singular band left after the deepest subdivision level, so the computed
// value underestimates; the true value lies in [value, value + error_bound]
// up to Gauss error on the resolved pairs. The bound is the geometric tail
// of the per-level increments with the worst-case ratio 2^{-(1-2s)}.
struct SeminormValue {
  double value = 0.0;
  double error_bound = 0.0;
};

// Slobodetskij seminorm of the Whitney representative,
//
//   value^2 = int int |u(x) - u(y)|^2 / dist(x, y)^{n + 2s} dx dy,
//
// with the periodic (shortest-representative) distance. Disjoint cell pairs
// use tensor Gauss quadrature; touching and identical pairs are subdivided
// hierarchically toward the diagonal and the unresolved band is reported in
// error_bound. Requires dim <= 2 and s in (0, 1/2); finite for piecewise
// smooth u with jumps exactly because s < 1/2.
SeminormValue slobodetskij(const DeRhamComplex& rc, const Cochain& u,
                           const SlobodetskijSpec& spec);

// Gram matrix of the squared seminorm over degree-k coefficients, assembled
// by the same pair quadrature (without the tail bound; the omitted band is
// the same relative scale on every mesh of the family).
SymmetricMatrix slobodetskij_gram(const DeRhamComplex& rc, int degree,
                                  const SlobodetskijSpec& spec);

// Slobodetskij seminorm of f minus the Whitney representative of u, by the
// same pair quadrature. Serves error fields of smooth targets, where the
// difference is neither a cochain nor smooth.
SeminormValue slobodetskij_difference(const DeRhamComplex& rc, const FormField& f,
                                      const Cochain& u, const SlobodetskijSpec& spec);

// Sobolev norm surrogate of order sigma through the Hodge-Laplacian
// eigenbasis of the same complex:
//
//   |u|_sigma^2 = sum_i (1 + lambda_i)^sigma <u, e_i>_M^2.
//
// Stands in for continuous norms of fractional (in particular negative)
// order, which are out of reach exactly; the surrogate preserves the
// h-scaling that the ratio experiments test.
double sobolev_surrogate(const HodgeTools& tools, const Cochain& u, double sigma);

// Per-mesh extremes of a sampled ratio of two seminorms.
struct MeshRatioStats {
  int subdivisions = 0;
  double width = 0.0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

// Outcome of one ratio experiment. Max ratios over random samples are
// sampling lower bounds of the operator constants, never upper bounds; the
// notes field repeats this caveat so serialized reports carry it.
struct SeminormReport {
  std::string id;
  int dim = 0;
  double s = 0.0;
  double s_prime = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  std::vector<MeshRatioStats> meshes;
  double fitted_exponent = 0.0;  // slope of log max_ratio against log width
  double r_squared = 0.0;
  double target_exponent = 0.0;
  std::string notes;
};

// Ratio of the broken H1-plus-jump seminorm to the domain seminorm over
// random graded cochains, one report across the given mesh sizes. The two
// seminorms are uniformly equivalent, so the sampled ratio interval should
// drift by a bounded factor as h shrinks.
SeminormReport equivalence_experiment(const Lattice& base, const std::vector<int>& m_list,
                                      int samples, std::uint64_t seed);

// Inverse inequality experiments on degree-0 cochains (constant component
// removed from every sample). Reports, in order:
//   fractional_vs_l2      |u|_s / |u|            target exponent -s
//   fractional_pair       |u|_s' / |u|_s         target exponent s - s'
//   gradient_vs_fractional |du| / |u|_s          target exponent s - 1
//   interpolation_product |u|_s / (|u|^{1-s} * broken^s)   bounded, target 0
//   gradient_dual_bound   |du|_s / sup_v <du, dv>/|v|      bounded
// The last two assert no growth rather than a slope; their fitted exponent
// should come out <= 0 within tolerance. Requires 0 < s < s' < 1/2.
std::vector<SeminormReport> inverse_inequality_suite(const Lattice& base,
                                                     const std::vector<int>& m_list, double s,
                                                     double s_prime, int samples,
                                                     std::uint64_t seed);

}  // namespace wdirac
