#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace wdirac {

using Vector = std::vector<double>;

inline void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Thrown when a computation fails numerically (non-SPD matrix, no
// convergence, residual above gate).  The CLI maps this to exit code 1.
struct NumericalFailure : std::runtime_error {
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}
  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  double* row(std::size_t i) { return a_.data() + i * cols_; }
  const double* row(std::size_t i) const { return a_.data() + i * cols_; }
  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

  Vector col(std::size_t j) const;
  void set_col(std::size_t j, const Vector& v);

 private:
  std::size_t rows_ = 0, cols_ = 0;
  Vector a_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Vector matvec(const Matrix& a, const Vector& x);
Vector tmatvec(const Matrix& a, const Vector& x);  // a^T x
Matrix scaled(const Matrix& a, double s);
double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);

double dot(const Vector& x, const Vector& y);
double norm2(const Vector& x);
void axpy_inplace(double a, const Vector& x, Vector& y);
Vector scaled(const Vector& x, double s);

// Symmetric matrix stored as the packed lower triangle; reads of (i, j) and
// (j, i) hit the same element, so structural symmetry is exact by storage.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t n) : n_(n), a_(n * (n + 1) / 2, 0.0) {}
  static SymmetricMatrix from_full(const Matrix& m, double asym_tol = 0.0);
  static SymmetricMatrix identity(std::size_t n);

  std::size_t size() const { return n_; }
  double& lower(std::size_t i, std::size_t j) {  // requires i >= j
    return a_[i * (i + 1) / 2 + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return i >= j ? a_[i * (i + 1) / 2 + j] : a_[j * (j + 1) / 2 + i];
  }
  Matrix full() const;
  void add_scaled(const SymmetricMatrix& other, double s);
  void add_scaled_identity(double s);

 private:
  std::size_t n_ = 0;
  Vector a_;
};

Vector matvec(const SymmetricMatrix& a, const Vector& x);

// Cholesky factorization a = l l^T (lower l).  Throws NumericalFailure if the
// matrix is not numerically SPD.
struct CholeskyFactor {
  Matrix l;
  Vector solve(Vector b) const;          // a x = b
  void solve_lower(Vector& b) const;     // l x = b
  void solve_lower_t(Vector& b) const;   // l^T x = b
  double log_det() const;
};
CholeskyFactor cholesky(const SymmetricMatrix& a);

struct LuFactor {
  Matrix lu;
  std::vector<int> piv;
  int sign = 1;
  Vector solve(Vector b) const;
};
LuFactor lu_factor(Matrix a);  // throws NumericalFailure on singular

// Thin SVD a = u diag(sigma) v^T via one-sided Jacobi; sigma descending,
// u (rows x rank-padded cols) and v (cols x cols) orthonormal columns.
struct SvdResult {
  Matrix u;
  Vector sigma;
  Matrix v;
  std::size_t rank(double rel_tol) const;
};
SvdResult jacobi_svd(Matrix a);

struct Triplet {
  int r, c;
  double v;
};

class SparseMatrix {
 public:
  SparseMatrix() = default;
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    const std::vector<Triplet>& entries);
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return vals_.size(); }
  Vector matvec(const Vector& x) const;
  Vector tmatvec(const Vector& x) const;
  Matrix to_dense() const;
  SymmetricMatrix to_symmetric(double asym_tol = 1e-12) const;
  void for_each(const std::function<void(int, int, double)>& fn) const;
  SparseMatrix transpose() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<int> row_ptr_, col_idx_;
  Vector vals_;
};

struct IntTriplet {
  int r, c;
  std::int64_t v;
};

// Integer sparse matrix (CSR) for incidence operators; arithmetic on these is
// exact.
class SparseIntMatrix {
 public:
  SparseIntMatrix() = default;
  static SparseIntMatrix from_triplets(std::size_t rows, std::size_t cols,
                                       std::vector<IntTriplet> entries);
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return vals_.size(); }
  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<std::int64_t>& vals() const { return vals_; }
  std::vector<std::int64_t> matvec(const std::vector<std::int64_t>& x) const;
  SparseMatrix to_double() const;
  SparseIntMatrix transpose() const;
  void for_each(const std::function<void(int, int, std::int64_t)>& fn) const;
  std::int64_t max_abs() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<int> row_ptr_, col_idx_;
  std::vector<std::int64_t> vals_;
};

SparseIntMatrix multiply(const SparseIntMatrix& a, const SparseIntMatrix& b);

// Conjugate gradients for s.p.s.d. systems with rhs in the range; apply(x, y)
// computes y = A x.  Returns iterations used, throws NumericalFailure if the
// tolerance is not reached.
int cg_solve(const std::function<void(const Vector&, Vector&)>& apply, const Vector& rhs,
             Vector& x, double rel_tol, int max_iter);

}  // namespace wdirac
