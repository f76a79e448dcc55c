#include "wdirac/whitney.hpp"

#include <cmath>
#include <utility>

#include "wdirac/quadrature.hpp"
#include "wdirac/simd.hpp"

namespace wdirac {

namespace {

constexpr double kFactorial[4] = {1.0, 1.0, 2.0, 6.0};

// determinant of the k x k matrix a[r][c] = rows[r][cols[c]], k <= 3;
// the empty determinant (k = 0) is 1
double minor_det(int k, const double* const* rows, const int* cols) {
  switch (k) {
    case 0:
      return 1.0;
    case 1:
      return rows[0][cols[0]];
    case 2:
      return rows[0][cols[0]] * rows[1][cols[1]] - rows[0][cols[1]] * rows[1][cols[0]];
    default: {
      const double a = rows[0][cols[0]], b = rows[0][cols[1]], c = rows[0][cols[2]];
      const double d = rows[1][cols[0]], e = rows[1][cols[1]], f = rows[1][cols[2]];
      const double g = rows[2][cols[0]], h = rows[2][cols[1]], i = rows[2][cols[2]];
      return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
    }
  }
}

}  // namespace

int form_component_count(int dim, int degree) { return int(binomial(dim, degree)); }

FormField::FormField(int dim, int degree, Eval eval)
    : dim_(dim), degree_(degree), components_(0), eval_(std::move(eval)) {
  require(dim >= 1 && dim <= 3, "FormField: dimension must be 1..3");
  require(degree >= 0 && degree <= dim, "FormField: degree out of range");
  require(static_cast<bool>(eval_), "FormField: empty callable");
  components_ = form_component_count(dim, degree);
}

FormField constant_form(int dim, int degree, std::vector<double> components) {
  require(int(components.size()) == form_component_count(dim, degree),
          "constant_form: wrong component count");
  return FormField(dim, degree,
                   [c = std::move(components)](const std::array<double, 3>&, double* out) {
                     for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i];
                   });
}

FormField scalar_form(int dim, std::function<double(const std::array<double, 3>&)> f) {
  require(static_cast<bool>(f), "scalar_form: empty callable");
  return FormField(dim, 0, [f = std::move(f)](const std::array<double, 3>& x, double* out) {
    out[0] = f(x);
  });
}

std::shared_ptr<const DeRhamComplex> DeRhamComplex::build(
    std::shared_ptr<const PeriodicMesh> mesh) {
  require(static_cast<bool>(mesh), "DeRhamComplex: null mesh");
  auto rc = std::shared_ptr<DeRhamComplex>(new DeRhamComplex());
  rc->mesh_ = std::move(mesh);
  const int n = rc->dim();
  rc->offsets_[0] = 0;
  for (int k = 0; k <= n; ++k) rc->offsets_[k + 1] = rc->offsets_[k] + rc->dof_count(k);
  rc->total_dofs_ = rc->offsets_[n + 1];
  rc->coboundary_.reserve(n);
  rc->coboundary_real_.reserve(n);
  for (int k = 0; k < n; ++k) {
    rc->coboundary_.push_back(rc->mesh_->boundary_matrix(k + 1).transpose());
    rc->coboundary_real_.push_back(rc->coboundary_.back().to_double());
  }
  rc->build_tables_and_mass();
  rc->mass_dense_.resize(std::size_t(n) + 1);
  return rc;
}

const SparseIntMatrix& DeRhamComplex::coboundary(int k) const {
  require(k >= 0 && k < dim(), "coboundary: degree out of range");
  return coboundary_[k];
}

const SparseMatrix& DeRhamComplex::coboundary_real(int k) const {
  require(k >= 0 && k < dim(), "coboundary: degree out of range");
  return coboundary_real_[k];
}

const SparseMatrix& DeRhamComplex::mass(int k) const {
  require(k >= 0 && k <= dim(), "mass: degree out of range");
  return mass_[k];
}

const SymmetricMatrix& DeRhamComplex::mass_dense(int k) const {
  require(k >= 0 && k <= dim(), "mass: degree out of range");
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto& slot = mass_dense_[k];
  if (!slot) slot = std::make_unique<SymmetricMatrix>(mass_[k].to_symmetric(1e-11));
  return *slot;
}

const double* DeRhamComplex::basis_term(int k, int cell, int f, int j) const {
  const int ncomp = form_component_count(dim(), k);
  return &tables_[k][std::size_t(cell) * table_cell_stride_[k] + f * table_face_stride_[k] +
                     j * ncomp];
}

// Whitney basis function of a (k+1)-vertex face sigma of a cell:
//   phi_sigma = k! sum_j (-1)^j lambda_{sigma_j} wedge_{l != j} d lambda_{sigma_l}.
// The wedge factors are constant per cell; their components, premultiplied by
// k! (-1)^j, are tabulated once. Mass integrals then reduce to the exact
// barycentric moment int_T lambda_a lambda_b = |T| (1 + delta_ab)/((n+1)(n+2))
// against plain dot products of the tabulated components. Cell and global
// face tuples are both ascending, so no orientation flips enter.
void DeRhamComplex::build_tables_and_mass() {
  const PeriodicMesh& mesh = *mesh_;
  const int n = mesh.dim();
  const int ncells = mesh.count(n);
  const double ip_scale = 1.0 / double((n + 1) * (n + 2));

  tables_.resize(std::size_t(n) + 1);
  std::vector<std::vector<Triplet>> trip(std::size_t(n) + 1);
  for (int k = 0; k <= n; ++k) {
    const int nfaces = int(ascending_subsets(n + 1, k + 1).size());
    const int ncomp = form_component_count(n, k);
    table_face_stride_[k] = (k + 1) * ncomp;
    table_cell_stride_[k] = nfaces * table_face_stride_[k];
    tables_[k].assign(std::size_t(ncells) * table_cell_stride_[k], 0.0);
    trip[k].reserve(std::size_t(ncells) * nfaces * nfaces);
  }

  for (int c = 0; c < ncells; ++c) {
    const double* g = mesh.cell_gradients(c);
    const double vol = mesh.measure(n, c);
    for (int k = 0; k <= n; ++k) {
      const auto& faces = ascending_subsets(n + 1, k + 1);
      const auto& comps = ascending_subsets(n, k);
      const int nfaces = int(faces.size());
      const int ncomp = int(comps.size());
      double* cell_tab = &tables_[k][std::size_t(c) * table_cell_stride_[k]];

      for (int f = 0; f < nfaces; ++f)
        for (int j = 0; j <= k; ++j) {
          double* w = cell_tab + f * table_face_stride_[k] + j * ncomp;
          const double* rows[3] = {nullptr, nullptr, nullptr};
          int pos = 0;
          for (int l = 0; l <= k; ++l)
            if (l != j) rows[pos++] = g + 3 * faces[f][l];
          const double sign = (j % 2 == 0) ? kFactorial[k] : -kFactorial[k];
          for (int ci = 0; ci < ncomp; ++ci)
            w[ci] = sign * minor_det(k, rows, comps[ci].data());
        }

      for (int f1 = 0; f1 < nfaces; ++f1) {
        const int gf1 = mesh.cell_face(c, k, f1);
        for (int f2 = 0; f2 < nfaces; ++f2) {
          const int gf2 = mesh.cell_face(c, k, f2);
          double acc = 0.0;
          for (int j = 0; j <= k; ++j) {
            const double* w1 = cell_tab + f1 * table_face_stride_[k] + j * ncomp;
            for (int l = 0; l <= k; ++l) {
              const double* w2 = cell_tab + f2 * table_face_stride_[k] + l * ncomp;
              double dotv = 0.0;
              for (int ci = 0; ci < ncomp; ++ci) dotv += w1[ci] * w2[ci];
              const double moment = faces[f1][j] == faces[f2][l] ? 2.0 : 1.0;
              acc += moment * dotv;
            }
          }
          trip[k].push_back({gf1, gf2, acc * vol * ip_scale});
        }
      }
    }
  }

  mass_.resize(std::size_t(n) + 1);
  for (int k = 0; k <= n; ++k)
    mass_[k] = SparseMatrix::from_triplets(std::size_t(dof_count(k)), std::size_t(dof_count(k)),
                                           std::move(trip[k]));
}

Cochain DeRhamComplex::apply_d(const Cochain& u) const {
  require(u.degree >= 0 && u.degree < dim(), "apply_d: degree out of range");
  require(int(u.values.size()) == dof_count(u.degree), "apply_d: size mismatch");
  return Cochain{u.degree + 1, coboundary_real_[u.degree].matvec(u.values)};
}

Cochain DeRhamComplex::interpolate(const FormField& field, int quad_order) const {
  require(field.dim() == dim(), "interpolate: field dimension mismatch");
  require(quad_order >= 1, "interpolate: quadrature order must be positive");
  const int n = dim();
  const int k = field.degree();
  Cochain out{k, Vector(std::size_t(dof_count(k)), 0.0)};

  if (k == 0) {
    double v = 0.0;
    for (int i = 0; i < dof_count(0); ++i) {
      field(mesh_->vertex_coord(i), &v);
      out.values[i] = v;
    }
    return out;
  }

  const QuadRule rule = simplex_rule(k, quad_order);
  const auto& comps = ascending_subsets(n, k);
  const int ncomp = int(comps.size());
  std::vector<double> vals(std::size_t(ncomp), 0.0);
  for (int i = 0; i < dof_count(k); ++i) {
    const double* q = mesh_->coords(k, i);
    double e[3][3] = {};
    for (int r = 0; r < k; ++r)
      for (int a = 0; a < n; ++a) e[r][a] = q[std::size_t(r + 1) * n + a] - q[a];
    const double* rows[3] = {e[0], e[1], e[2]};
    double minors[3];
    for (int ci = 0; ci < ncomp; ++ci) minors[ci] = minor_det(k, rows, comps[ci].data());

    double acc = 0.0;
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (std::size_t p = 0; p < rule.size(); ++p) {
      for (int a = 0; a < n; ++a) {
        double xa = q[a];
        for (int r = 0; r < k; ++r) xa += rule.points[p][r] * e[r][a];
        x[a] = xa;
      }
      field(x, vals.data());
      double s = 0.0;
      for (int ci = 0; ci < ncomp; ++ci) s += vals[ci] * minors[ci];
      acc += rule.weights[p] * s;
    }
    out.values[i] = acc;
  }
  return out;
}

void DeRhamComplex::evaluate_in_cell(const Cochain& u, int cell,
                                     const std::array<double, 4>& lambda, double* out) const {
  const int n = dim();
  const int k = u.degree;
  require(k >= 0 && k <= n, "evaluate: degree out of range");
  const auto& faces = ascending_subsets(n + 1, k + 1);
  const int ncomp = form_component_count(n, k);
  for (int ci = 0; ci < ncomp; ++ci) out[ci] = 0.0;
  for (int f = 0; f < int(faces.size()); ++f) {
    const double coeff = u.values[std::size_t(mesh_->cell_face(cell, k, f))];
    if (coeff == 0.0) continue;
    for (int j = 0; j <= k; ++j) {
      const double clj = coeff * lambda[std::size_t(faces[f][j])];
      const double* w = basis_term(k, cell, f, j);
      for (int ci = 0; ci < ncomp; ++ci) out[ci] += clj * w[ci];
    }
  }
}

void DeRhamComplex::basis_values(int k, int cell, const std::array<double, 4>& lambda,
                                 double* out) const {
  const int n = dim();
  require(k >= 0 && k <= n, "basis_values: degree out of range");
  const auto& faces = ascending_subsets(n + 1, k + 1);
  const int ncomp = form_component_count(n, k);
  for (int f = 0; f < int(faces.size()); ++f) {
    double* dst = out + f * ncomp;
    for (int ci = 0; ci < ncomp; ++ci) dst[ci] = 0.0;
    for (int j = 0; j <= k; ++j) {
      const double lj = lambda[std::size_t(faces[f][j])];
      const double* w = basis_term(k, cell, f, j);
      for (int ci = 0; ci < ncomp; ++ci) dst[ci] += lj * w[ci];
    }
  }
}

void DeRhamComplex::evaluate(const Cochain& u, const std::array<double, 3>& x,
                             double* out) const {
  const PeriodicMesh::Location loc = mesh_->locate(x);
  evaluate_in_cell(u, loc.cell, loc.lambda, out);
}

double DeRhamComplex::l2_inner(const Cochain& u, const Cochain& v) const {
  require(u.degree == v.degree, "l2_inner: degree mismatch");
  require(u.values.size() == v.values.size() && int(u.values.size()) == dof_count(u.degree),
          "l2_inner: size mismatch");
  const Vector mv = mass_[u.degree].matvec(v.values);
  return simd::dot(u.values.data(), mv.data(), mv.size());
}

double DeRhamComplex::l2_inner(const GradedCochain& u, const GradedCochain& v) const {
  require(u.dim == dim() && v.dim == dim(), "l2_inner: dimension mismatch");
  double acc = 0.0;
  for (int k = 0; k <= dim(); ++k)
    acc += l2_inner(Cochain{k, u.values[k]}, Cochain{k, v.values[k]});
  return acc;
}

double DeRhamComplex::l2_norm(const Cochain& u) const { return std::sqrt(l2_inner(u, u)); }

double DeRhamComplex::l2_norm(const GradedCochain& u) const {
  return std::sqrt(l2_inner(u, u));
}

Vector DeRhamComplex::flatten(const GradedCochain& u) const {
  require(u.dim == dim(), "flatten: dimension mismatch");
  Vector x(std::size_t(total_dofs_), 0.0);
  for (int k = 0; k <= dim(); ++k) {
    require(int(u.values[k].size()) == dof_count(k), "flatten: block size mismatch");
    std::copy(u.values[k].begin(), u.values[k].end(), x.begin() + offsets_[k]);
  }
  return x;
}

GradedCochain DeRhamComplex::unflatten(const Vector& x) const {
  require(int(x.size()) == total_dofs_, "unflatten: size mismatch");
  GradedCochain u;
  u.dim = dim();
  for (int k = 0; k <= dim(); ++k)
    u.values[k].assign(x.begin() + offsets_[k], x.begin() + offsets_[k + 1]);
  return u;
}

}  // namespace wdirac
