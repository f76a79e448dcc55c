#pragma once

#include "wdirac/whitney.hpp"

namespace wdirac {

// Symmetric bilinear form on the flattened graded dof vector. Storage is one
// packed triangle, so structural symmetry is exact; the block flags record
// which degree pairs carry nonzero entries.
struct BlockOperator {
  std::shared_ptr<const DeRhamComplex> complex;
  SymmetricMatrix matrix;

  int total() const { return complex ? complex->total_dof_count() : 0; }
};

// true when every nonzero entry sits in a block (row degree, col degree)
// allowed by `allowed(kr, kc)`
template <typename Pred>
bool block_structure_is(const BlockOperator& op, Pred allowed) {
  const DeRhamComplex& rc = *op.complex;
  const int n = rc.dim();
  auto degree_of = [&](int i) {
    int k = 0;
    while (k < n && i >= rc.graded_offset(k + 1)) ++k;
    return k;
  };
  const int total = op.total();
  for (int i = 0; i < total; ++i)
    for (int j = 0; j <= i; ++j)
      if (op.matrix(std::size_t(i), std::size_t(j)) != 0.0 &&
          !allowed(degree_of(i), degree_of(j)))
        return false;
  return true;
}

// zero-order perturbations of the Dirac form: parity-graded mass term m,
// scalar potential V (quadrature-assembled), and a spectral shift mu
struct PerturbationSpec {
  double mass = 0.0;
  double shift = 0.0;
  std::function<double(const std::array<double, 3>&)> potential;  // empty = none
  int potential_quad_order = 5;

  void validate(const PeriodicMesh& mesh) const;
};

// a(u,v) = <du,v> + <u,dv>: block (k+1,k) is M_{k+1} d_k, transpose mirrored
BlockOperator assemble_dirac_form(const DeRhamComplex& rc);

// block-diagonal graded mass matrix
BlockOperator graded_mass(const DeRhamComplex& rc);

// diagonal of the parity sign operator S: +1 on even degrees, -1 on odd
Vector parity_signs(const DeRhamComplex& rc);

// epsilon = M S; block-diagonal, symmetric since S is constant per block
BlockOperator parity_mass(const DeRhamComplex& rc);

// C_k[i,j] = int_S V phi_i . phi_j, assembled cell by cell by quadrature
BlockOperator potential_term(const DeRhamComplex& rc,
                             const std::function<double(const std::array<double, 3>&)>& v,
                             int quad_order = 5);

// A + mass * (M S) + C_V + shift * M
BlockOperator perturbed_operator(const BlockOperator& a, const BlockOperator& m,
                                 const PerturbationSpec& spec);

}  // namespace wdirac
