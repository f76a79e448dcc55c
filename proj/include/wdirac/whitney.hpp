#pragma once

#include <functional>
#include <memory>
#include <mutex>

#include "wdirac/mesh.hpp"

namespace wdirac {

// Values of k-forms are represented by their C(dim, k) components in the
// basis dx_I over ascending multi-indices I, listed lexicographically
// (e.g. dim 3, k = 2: dx01, dx02, dx12). The Euclidean metric makes this
// basis orthonormal, so pointwise inner products are plain dot products.
int form_component_count(int dim, int degree);

// A smooth differential form on the torus, given as a callable that fills
// `out` with the component values at x. The callable must be periodic.
class FormField {
 public:
  using Eval = std::function<void(const std::array<double, 3>& x, double* out)>;

  FormField(int dim, int degree, Eval eval);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int components() const { return components_; }
  void operator()(const std::array<double, 3>& x, double* out) const { eval_(x, out); }

 private:
  int dim_;
  int degree_;
  int components_;
  Eval eval_;
};

FormField constant_form(int dim, int degree, std::vector<double> components);
FormField scalar_form(int dim, std::function<double(const std::array<double, 3>&)> f);

// Coefficients of a degree-k element of the complex, one per k-simplex.
// The degree of freedom on a simplex is the integral of the form over it.
struct Cochain {
  int degree = 0;
  Vector values;
};

// One cochain per degree 0..dim.
struct GradedCochain {
  int dim = 0;
  std::array<Vector, 4> values;
};

// Lowest-order Whitney complex on a periodic mesh: coboundary matrices,
// exactly integrated mass matrices, canonical interpolation, and pointwise
// evaluation. Immutable after build; lazy caches are mutex-guarded.
class DeRhamComplex : public std::enable_shared_from_this<DeRhamComplex> {
 public:
  static std::shared_ptr<const DeRhamComplex> build(std::shared_ptr<const PeriodicMesh> mesh);

  std::shared_ptr<const DeRhamComplex> shared() const { return shared_from_this(); }
  const PeriodicMesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const PeriodicMesh>& mesh_ptr() const { return mesh_; }
  int dim() const { return mesh_->dim(); }
  double width() const { return mesh_->width(); }

  int dof_count(int k) const { return mesh_->count(k); }
  int total_dof_count() const { return total_dofs_; }
  int graded_offset(int k) const { return offsets_[k]; }

  // d_k maps degree k to degree k+1; equals the transpose of the signed
  // boundary incidence, so d_{k+1} d_k = 0 holds in integer arithmetic
  const SparseIntMatrix& coboundary(int k) const;
  const SparseMatrix& coboundary_real(int k) const;

  const SparseMatrix& mass(int k) const;
  const SymmetricMatrix& mass_dense(int k) const;  // built on first use

  Cochain apply_d(const Cochain& u) const;

  // canonical interpolation: dof on each k-simplex is the integral of the
  // pullback of the field, by Gauss quadrature of the requested order
  Cochain interpolate(const FormField& field, int quad_order = 5) const;

  // value of the Whitney representative at a point (containing cell found
  // by point location) or at barycentric coordinates of a known cell
  void evaluate(const Cochain& u, const std::array<double, 3>& x, double* out) const;
  void evaluate_in_cell(const Cochain& u, int cell, const std::array<double, 4>& lambda,
                        double* out) const;

  // component values of every degree-k basis function supported on the cell,
  // face-major: out[f * components + c] for the f-th local face
  void basis_values(int k, int cell, const std::array<double, 4>& lambda, double* out) const;

  double l2_inner(const Cochain& u, const Cochain& v) const;
  double l2_inner(const GradedCochain& u, const GradedCochain& v) const;
  double l2_norm(const Cochain& u) const;
  double l2_norm(const GradedCochain& u) const;

  Vector flatten(const GradedCochain& u) const;
  GradedCochain unflatten(const Vector& x) const;

 private:
  DeRhamComplex() = default;
  void build_tables_and_mass();

  // constant form carried by the j-th term of the Whitney basis function of
  // the local face (degree k, lex face index f) on a cell, including the
  // k! (-1)^j factor; component stride form_component_count(dim, k)
  const double* basis_term(int k, int cell, int f, int j) const;

  std::shared_ptr<const PeriodicMesh> mesh_;
  int total_dofs_ = 0;
  std::array<int, 5> offsets_{};
  std::vector<SparseIntMatrix> coboundary_;  // index k = 0..dim-1
  std::vector<SparseMatrix> coboundary_real_;
  std::vector<SparseMatrix> mass_;
  std::vector<std::vector<double>> tables_;  // per degree, per cell/face/term
  std::array<int, 4> table_face_stride_{}, table_cell_stride_{};

  mutable std::mutex cache_mutex_;
  mutable std::vector<std::unique_ptr<SymmetricMatrix>> mass_dense_;
};

}  // namespace wdirac
