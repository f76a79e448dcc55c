#pragma once

#include <cstdint>
#include <memory>
#include <mutex>

#include "wdirac/whitney.hpp"

namespace wdirac {

// M_k-orthonormal eigenpairs of the pencil (d_k^T M_{k+1} d_k, M_k) at one
// degree, ascending, so the kernel of d_k forms a prefix. At the top degree
// there is no d and the whole space counts as kernel.
struct UpSpectrum {
  Vector mu;
  std::vector<Vector> modes;
  int kernel_dim = 0;
  double zero_threshold = 0.0;
};

// M-orthonormal basis of the discrete harmonic space at one degree:
// ker d cap (im d)^perp. Dimension is pinned to binomial(dim, degree) at
// construction; a mismatch is a hard failure, not a warning.
struct HarmonicBasis {
  int degree = 0;
  std::vector<Vector> vectors;
  int dimension() const { return int(vectors.size()); }
};

// u = d w + v + g with w minimal-norm in the orthogonal complement of
// ker d at degree k-1, v orthogonal to ker d at degree k, g harmonic.
struct HodgeDecomposition {
  int degree = 0;
  Cochain potential;  // w, degree k-1 (empty at degree 0)
  Cochain exact;      // d w
  Cochain coexact;    // v
  Cochain harmonic;   // g
  double identity_residual = 0.0;       // |u - dw - v - g|_M / |u|_M
  double max_cross_inner = 0.0;         // worst pairwise M-product / |u|_M^2
  double coexact_kernel_residual = 0.0; // |proj of v onto ker d|_M / |u|_M
  double stability_ratio = 0.0;         // |w|_M / |u|_M
};

// Full Hodge-Laplacian eigenpairs at one degree, assembled from the up
// spectra of the two adjacent degrees; lambda ascending, harmonics first.
struct LaplacianSpectrum {
  Vector lambda;
  std::vector<Vector> modes;  // M-orthonormal
};

// Max over sampled u orthogonal to ker d of |u - Pu|_L2 / |du|_L2, where P
// projects onto the same subspace of a once-refined mesh standing in for the
// continuous complex.
struct GapReport {
  int degree = 0;
  int samples_used = 0;
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  double embed_defect = 0.0;  // worst relative L2 norm change under embedding
};

// Spectral toolbox for the discrete Hodge machinery of one complex. All
// heavy objects (per-degree dense eigendecompositions) are built on first
// use and cached; the instance is cheap to construct.
class HodgeTools {
 public:
  explicit HodgeTools(std::shared_ptr<const DeRhamComplex> rc);

  const DeRhamComplex& complex() const { return *rc_; }

  const UpSpectrum& up_spectrum(int k) const;
  // M-orthonormal basis of im d_{k-1} at degree k (empty at degree 0)
  const std::vector<Vector>& exact_basis(int k) const;
  const HarmonicBasis& harmonic(int k) const;
  const LaplacianSpectrum& laplacian_spectrum(int k) const;

  // M_{k-1} y = d_{k-1}^T M_k u, the discrete adjoint of d
  Cochain codifferential(const Cochain& u) const;
  HodgeDecomposition decompose(const Cochain& u) const;
  // M-orthogonal projection onto ker d (the exact plus harmonic parts)
  Cochain kernel_projection(const Cochain& u) const;
  // solves <d Pu, dv> = <du, dv> for all v, with Pu orthogonal to ker d
  Cochain p_h(const Cochain& u) const;

  // M-orthonormal graded basis of the complement of the harmonic spaces
  // across all degrees, as columns in flattened graded coordinates
  Matrix nonharmonic_graded_basis() const;

 private:
  const UpSpectrum& up_locked(int k) const;
  const std::vector<Vector>& exact_locked(int k) const;
  const HarmonicBasis& harmonic_locked(int k) const;

  std::shared_ptr<const DeRhamComplex> rc_;
  mutable std::mutex mutex_;
  mutable std::array<std::unique_ptr<UpSpectrum>, 4> up_;
  mutable std::array<std::unique_ptr<std::vector<Vector>>, 4> exact_;
  mutable std::array<std::unique_ptr<HarmonicBasis>, 4> harmonic_;
  mutable std::array<std::unique_ptr<LaplacianSpectrum>, 4> laplacian_;
};

// One-shot entry points. For repeated calls on the same complex construct a
// HodgeTools instance instead; these rebuild spectral data every time
// (except weak_codifferential, which only runs a CG solve).
Cochain weak_codifferential(const DeRhamComplex& rc, const Cochain& u);
HarmonicBasis harmonic_basis(const DeRhamComplex& rc, int k);
HodgeDecomposition hodge_decompose(const DeRhamComplex& rc, const Cochain& u);
Cochain p_h_projector(const DeRhamComplex& rc, const Cochain& u);
Cochain p_h_projector(const DeRhamComplex& rc, const FormField& field, int quad_order = 9);

// Cochains of the constant k-forms, M-orthonormalized. On the flat torus
// these span the harmonic space exactly, which gap_measurement exploits to
// avoid the large eigensolve at the sampled degree.
std::vector<Vector> constant_forms_basis(const DeRhamComplex& rc, int k);

GapReport gap_measurement(const DeRhamComplex& rc, int degree, int samples, std::uint64_t seed);

}  // namespace wdirac
