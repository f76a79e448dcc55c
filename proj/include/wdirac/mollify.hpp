#pragma once

#include <memory>
#include <vector>

#include "wdirac/whitney.hpp"

namespace wdirac {

// Compactly supported bump c (1 - |x|^2)^q on the unit ball of R^dim,
// normalized to unit mass. q = 3 keeps two continuous derivatives across the
// support boundary, enough for the second-order rates measured here.
struct Mollifier {
  int dim = 1;
  int q = 3;
  // smoothing radius as a fraction of the minimum cell width of the mesh the
  // mollifier is used on; capped so the ball never leaves the neighbor patch
  double eps = 0.25;
  double normalization = 0.0;

  // profile value at squared radius, zero outside the unit ball
  double profile(double r2) const;
};

// Computes the normalization from the closed-form ball integral and verifies
// it against a radial quadrature; throws NumericalFailure on disagreement.
// Requires q >= 1 and 0 < eps <= 0.49.
Mollifier make_mollifier(int dim, int q = 3, double eps = 0.25);

// Unit-ball mass of the profile by quadrature, for checking the unit-mass
// invariant independently of make_mollifier.
double mollifier_mass(const Mollifier& mol, int quad_order = 9);

// Value at x of the smoothed field, smoothing radius eps times the minimum
// cell width. Dimension 1 splits the window at the lattice breaks, so
// piecewise-smooth inputs integrate exactly; dimension 2 uses a radial-
// angular disc rule. Dimension 3 is rejected (cost).
void convolve(const DeRhamComplex& rc, const Mollifier& mol, const FormField& u,
              const std::array<double, 3>& x, double* out, int quad_order = 7);

FormField convolved(std::shared_ptr<const DeRhamComplex> rc, const Mollifier& mol,
                    const FormField& u, int quad_order = 7);

// Whitney representative of a cochain as a form field (periodic, evaluated
// by point location).
FormField whitney_field(std::shared_ptr<const DeRhamComplex> rc, Cochain u);

// Smoothing followed by canonical interpolation, J = I_h (phi_r * .), and the
// projection P = (J restricted to the complex)^{-1} J. P reproduces the
// complex and is idempotent by construction; commuting with d holds up to
// quadrature error.
class SmoothedProjector {
 public:
  const DeRhamComplex& complex() const { return *rc_; }
  const Mollifier& mollifier() const { return mol_; }
  double radius() const { return radius_; }
  int quad_order() const { return quad_order_; }

  // restriction of J to the degree-k subcomplex and its condition number
  const Matrix& restriction(int degree) const;
  double condition(int degree) const;

  Cochain smooth_interpolate(const FormField& f) const;  // J f
  Cochain project(const FormField& f) const;             // P f
  Cochain project(const Cochain& u) const;               // P on the complex

 private:
  friend SmoothedProjector build_projector(std::shared_ptr<const DeRhamComplex> rc,
                                           const Mollifier& mol, int quad_order);
  SmoothedProjector() = default;

  std::shared_ptr<const DeRhamComplex> rc_;
  Mollifier mol_;
  int quad_order_ = 7;
  double radius_ = 0.0;
  std::vector<Matrix> j_;
  std::vector<LuFactor> lu_;
  std::vector<double> cond_;
};

// Assembles the restriction matrices degree by degree and factorizes them.
// Refuses restrictions with condition number above 1e6; the default radius
// keeps them near the identity.
SmoothedProjector build_projector(std::shared_ptr<const DeRhamComplex> rc, const Mollifier& mol,
                                  int quad_order = 7);

// relative size of d(P u) - P(du) for a smooth field with analytic exterior
// derivative; nonzero only through quadrature error
double commutation_residual(const SmoothedProjector& proj, const FormField& u,
                            const FormField& du);

// Per-mesh conditioning and stability of the projector family at a fixed
// relative radius, per degree. equiv_min and equiv_max are the extreme
// ratios |J u| / |u| over the subcomplex in the mass norm; l2_norm is the
// mass norm of the inverse restriction (P is the identity on its own
// coefficients, so this factor carries all the mesh dependence of its L2
// bound).
struct StabilityReport {
  int subdivisions = 0;
  double width = 0.0;
  std::vector<double> condition;
  std::vector<double> l2_norm;
  std::vector<double> equiv_min;
  std::vector<double> equiv_max;
};

std::vector<StabilityReport> stability_experiment(const Lattice& base,
                                                  const std::vector<int>& m_list,
                                                  const Mollifier& mol, int quad_order = 7);

// L2 errors of P u and of the plain smoothed interpolation J u against a
// smooth field over a mesh family, with fitted convergence orders. The
// fractional error is measured in dimension 1 for scalar fields only.
struct ProjectorRates {
  Vector widths;
  Vector projector_error;
  Vector smoothed_interp_error;
  Vector fractional_error;  // empty unless dim 1, degree 0
  double projector_order = 0.0;
  double smoothed_interp_order = 0.0;
  double fractional_order = 0.0;
  double fractional_s = 0.0;
};

ProjectorRates rate_experiment(const Lattice& base, const std::vector<int>& m_list,
                               const FormField& u, const Mollifier& mol, int quad_order = 7,
                               double s_prime = 0.4);

}  // namespace wdirac
