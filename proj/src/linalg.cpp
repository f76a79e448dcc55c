#include "wdirac/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wdirac/simd.hpp"

namespace wdirac {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector Matrix::col(std::size_t j) const {
  Vector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void Matrix::set_col(std::size_t j, const Vector& v) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matmul: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = ai[k];
      if (aik == 0.0) continue;
      simd::axpy(aik, b.row(k), ci, b.cols());
    }
  }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix add: shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) c.data()[i] += b.data()[i];
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix sub: shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) c.data()[i] -= b.data()[i];
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Vector matvec(const Matrix& a, const Vector& x) {
  require(x.size() == a.cols(), "matvec: shape mismatch");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = simd::dot(a.row(i), x.data(), a.cols());
  return y;
}

Vector tmatvec(const Matrix& a, const Vector& x) {
  require(x.size() == a.rows(), "tmatvec: shape mismatch");
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) simd::axpy(x[i], a.row(i), y.data(), a.cols());
  return y;
}

Matrix scaled(const Matrix& a, double s) {
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) c.data()[i] *= s;
  return c;
}

double frobenius_norm(const Matrix& a) {
  return std::sqrt(simd::sum_sq(a.data(), a.rows() * a.cols()));
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) m = std::max(m, std::fabs(a.data()[i]));
  return m;
}

double dot(const Vector& x, const Vector& y) {
  require(x.size() == y.size(), "dot: size mismatch");
  return simd::dot(x.data(), y.data(), x.size());
}

double norm2(const Vector& x) { return std::sqrt(simd::sum_sq(x.data(), x.size())); }

void axpy_inplace(double a, const Vector& x, Vector& y) {
  require(x.size() == y.size(), "axpy: size mismatch");
  simd::axpy(a, x.data(), y.data(), x.size());
}

Vector scaled(const Vector& x, double s) {
  Vector y = x;
  for (double& v : y) v *= s;
  return y;
}

SymmetricMatrix SymmetricMatrix::from_full(const Matrix& m, double asym_tol) {
  require(m.rows() == m.cols(), "from_full: not square");
  const std::size_t n = m.rows();
  if (asym_tol >= 0.0) {
    double defect = 0.0, scale = max_abs(m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) defect = std::max(defect, std::fabs(m(i, j) - m(j, i)));
    if (defect > asym_tol * std::max(scale, 1e-300))
      throw NumericalFailure("from_full: matrix not symmetric within tolerance");
  }
  SymmetricMatrix s(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) s.lower(i, j) = 0.5 * (m(i, j) + m(j, i));
  return s;
}

SymmetricMatrix SymmetricMatrix::identity(std::size_t n) {
  SymmetricMatrix s(n);
  for (std::size_t i = 0; i < n; ++i) s.lower(i, i) = 1.0;
  return s;
}

Matrix SymmetricMatrix::full() const {
  Matrix m(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j <= i; ++j) m(i, j) = m(j, i) = a_[i * (i + 1) / 2 + j];
  return m;
}

void SymmetricMatrix::add_scaled(const SymmetricMatrix& other, double s) {
  require(other.n_ == n_, "add_scaled: size mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += s * other.a_[i];
}

void SymmetricMatrix::add_scaled_identity(double s) {
  for (std::size_t i = 0; i < n_; ++i) lower(i, i) += s;
}

Vector matvec(const SymmetricMatrix& a, const Vector& x) {
  require(x.size() == a.size(), "sym matvec: size mismatch");
  const std::size_t n = a.size();
  Vector y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      const double v = a(i, j);
      acc += v * x[j];
      y[j] += v * x[i];
    }
    y[i] += acc + a(i, i) * x[i];
  }
  return y;
}

CholeskyFactor cholesky(const SymmetricMatrix& a) {
  const std::size_t n = a.size();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j) - simd::sum_sq(l.row(j), j);
    if (!(d > 0.0)) throw NumericalFailure("cholesky: matrix not positive definite");
    d = std::sqrt(d);
    l(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i)
      l(i, j) = (a(i, j) - simd::dot(l.row(i), l.row(j), j)) / d;
  }
  return CholeskyFactor{std::move(l)};
}

void CholeskyFactor::solve_lower(Vector& b) const {
  const std::size_t n = l.rows();
  for (std::size_t i = 0; i < n; ++i)
    b[i] = (b[i] - simd::dot(l.row(i), b.data(), i)) / l(i, i);
}

void CholeskyFactor::solve_lower_t(Vector& b) const {
  const std::size_t n = l.rows();
  for (std::size_t ii = n; ii-- > 0;) {
    b[ii] /= l(ii, ii);
    simd::axpy(-b[ii], l.row(ii), b.data(), ii);
  }
}

Vector CholeskyFactor::solve(Vector b) const {
  require(b.size() == l.rows(), "cholesky solve: size mismatch");
  solve_lower(b);
  solve_lower_t(b);
  return b;
}

double CholeskyFactor::log_det() const {
  double s = 0.0;
  for (std::size_t i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

LuFactor lu_factor(Matrix a) {
  require(a.rows() == a.cols(), "lu: not square");
  const std::size_t n = a.rows();
  LuFactor f;
  f.piv.resize(n);
  std::iota(f.piv.begin(), f.piv.end(), 0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::fabs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(a(i, k)) > best) best = std::fabs(a(i, k)), p = i;
    if (best == 0.0) throw NumericalFailure("lu: singular matrix");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(f.piv[k], f.piv[p]);
      f.sign = -f.sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      a(i, k) /= a(k, k);
      simd::axpy(-a(i, k), a.row(k) + k + 1, a.row(i) + k + 1, n - k - 1);
    }
  }
  f.lu = std::move(a);
  return f;
}

Vector LuFactor::solve(Vector b) const {
  const std::size_t n = lu.rows();
  require(b.size() == n, "lu solve: size mismatch");
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[piv[i]];
  for (std::size_t i = 1; i < n; ++i) x[i] -= simd::dot(lu.row(i), x.data(), i);
  for (std::size_t ii = n; ii-- > 0;) {
    x[ii] = (x[ii] - simd::dot(lu.row(ii) + ii + 1, x.data() + ii + 1, n - ii - 1)) / lu(ii, ii);
  }
  return x;
}

std::size_t SvdResult::rank(double rel_tol) const {
  if (sigma.empty()) return 0;
  const double cut = rel_tol * sigma.front();
  std::size_t r = 0;
  while (r < sigma.size() && sigma[r] > cut) ++r;
  return r;
}

// One-sided Jacobi on columns: rotate column pairs of b until all are
// mutually orthogonal, accumulating the rotations in v.
SvdResult jacobi_svd(Matrix a) {
  const std::size_t m = a.rows(), n = a.cols();
  Matrix bt = transpose(a);  // work on rows of b^T so columns of b are contiguous
  Matrix vt = Matrix::identity(n);
  const double eps = 1e-14;
  // columns this far below the Frobenius scale carry only rotation noise;
  // freezing them keeps rank-deficient inputs from cycling forever
  double fro2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) fro2 += simd::sum_sq(bt.row(j), m);
  const double null2 = fro2 * 1e-30;
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double app = simd::sum_sq(bt.row(p), m);
        const double aqq = simd::sum_sq(bt.row(q), m);
        if (app <= null2 || aqq <= null2) continue;
        const double apq = simd::dot(bt.row(p), bt.row(q), m);
        if (std::fabs(apq) <= eps * std::sqrt(app * aqq) || apq == 0.0) continue;
        off = std::max(off, std::fabs(apq) / std::sqrt(std::max(app * aqq, 1e-300)));
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = t * c;
        simd::rot2(bt.row(p), bt.row(q), c, s, m);
        simd::rot2(vt.row(p), vt.row(q), c, s, n);
      }
    }
    if (off < 1e-15) break;
    if (sweep == 59) throw NumericalFailure("jacobi_svd: no convergence in 60 sweeps");
  }
  SvdResult r;
  r.sigma.resize(n);
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < n; ++j) {
    r.sigma[j] = std::sqrt(simd::sum_sq(bt.row(j), m));
    order[j] = j;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return r.sigma[x] > r.sigma[y]; });
  Vector sorted(n);
  r.u = Matrix(m, n);
  r.v = Matrix(n, n);
  for (std::size_t jj = 0; jj < n; ++jj) {
    const std::size_t j = order[jj];
    sorted[jj] = r.sigma[j];
    const double inv = r.sigma[j] > 0.0 ? 1.0 / r.sigma[j] : 0.0;
    for (std::size_t i = 0; i < m; ++i) r.u(i, jj) = bt(j, i) * inv;
    for (std::size_t i = 0; i < n; ++i) r.v(i, jj) = vt(j, i);
  }
  r.sigma = std::move(sorted);
  return r;
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         const std::vector<Triplet>& entries) {
  SparseMatrix s;
  s.rows_ = rows;
  s.cols_ = cols;
  std::vector<Triplet> sorted = entries;
  std::stable_sort(sorted.begin(), sorted.end(), [](const Triplet& x, const Triplet& y) {
    return x.r != y.r ? x.r < y.r : x.c < y.c;
  });
  s.row_ptr_.assign(rows + 1, 0);
  int cur_row = -1;
  for (const Triplet& t : sorted) {
    require(t.r >= 0 && t.r < int(rows) && t.c >= 0 && t.c < int(cols),
            "sparse: triplet out of range");
    if (t.r == cur_row && !s.col_idx_.empty() && s.col_idx_.back() == t.c) {
      s.vals_.back() += t.v;  // duplicates are adjacent after the sort
      continue;
    }
    cur_row = t.r;
    s.col_idx_.push_back(t.c);
    s.vals_.push_back(t.v);
    s.row_ptr_[t.r + 1]++;
  }
  for (std::size_t i = 0; i < rows; ++i) s.row_ptr_[i + 1] += s.row_ptr_[i];
  return s;
}

Vector SparseMatrix::matvec(const Vector& x) const {
  require(x.size() == cols_, "sparse matvec: size mismatch");
  Vector y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double acc = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) acc += vals_[k] * x[col_idx_[k]];
    y[i] = acc;
  }
  return y;
}

Vector SparseMatrix::tmatvec(const Vector& x) const {
  require(x.size() == rows_, "sparse tmatvec: size mismatch");
  Vector y(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) y[col_idx_[k]] += vals_[k] * x[i];
  return y;
}

Matrix SparseMatrix::to_dense() const {
  Matrix d(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d(i, col_idx_[k]) += vals_[k];
  return d;
}

SymmetricMatrix SparseMatrix::to_symmetric(double asym_tol) const {
  return SymmetricMatrix::from_full(to_dense(), asym_tol);
}

void SparseMatrix::for_each(const std::function<void(int, int, double)>& fn) const {
  for (std::size_t i = 0; i < rows_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) fn(int(i), col_idx_[k], vals_[k]);
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for_each([&](int r, int c, double v) { t.push_back({c, r, v}); });
  return from_triplets(cols_, rows_, t);
}

SparseIntMatrix SparseIntMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                               std::vector<IntTriplet> entries) {
  SparseIntMatrix s;
  s.rows_ = rows;
  s.cols_ = cols;
  std::stable_sort(entries.begin(), entries.end(), [](const IntTriplet& x, const IntTriplet& y) {
    return x.r != y.r ? x.r < y.r : x.c < y.c;
  });
  s.row_ptr_.assign(rows + 1, 0);
  int cur_row = -1;
  for (const IntTriplet& t : entries) {
    require(t.r >= 0 && t.r < int(rows) && t.c >= 0 && t.c < int(cols),
            "sparse int: triplet out of range");
    if (t.r == cur_row && !s.col_idx_.empty() && s.col_idx_.back() == t.c) {
      s.vals_.back() += t.v;
      continue;
    }
    cur_row = t.r;
    s.col_idx_.push_back(t.c);
    s.vals_.push_back(t.v);
    s.row_ptr_[t.r + 1]++;
  }
  for (std::size_t i = 0; i < rows; ++i) s.row_ptr_[i + 1] += s.row_ptr_[i];
  return s;
}

std::vector<std::int64_t> SparseIntMatrix::matvec(const std::vector<std::int64_t>& x) const {
  require(x.size() == cols_, "int matvec: size mismatch");
  std::vector<std::int64_t> y(rows_, 0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) y[i] += vals_[k] * x[col_idx_[k]];
  return y;
}

SparseMatrix SparseIntMatrix::to_double() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for_each([&](int r, int c, std::int64_t v) { t.push_back({r, c, double(v)}); });
  return SparseMatrix::from_triplets(rows_, cols_, t);
}

SparseIntMatrix SparseIntMatrix::transpose() const {
  std::vector<IntTriplet> t;
  t.reserve(nnz());
  for_each([&](int r, int c, std::int64_t v) { t.push_back({c, r, v}); });
  return from_triplets(cols_, rows_, std::move(t));
}

void SparseIntMatrix::for_each(const std::function<void(int, int, std::int64_t)>& fn) const {
  for (std::size_t i = 0; i < rows_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) fn(int(i), col_idx_[k], vals_[k]);
}

std::int64_t SparseIntMatrix::max_abs() const {
  std::int64_t m = 0;
  for (std::int64_t v : vals_) m = std::max(m, v < 0 ? -v : v);
  return m;
}

SparseIntMatrix multiply(const SparseIntMatrix& a, const SparseIntMatrix& b) {
  require(a.cols() == b.rows(), "int multiply: shape mismatch");
  std::vector<IntTriplet> out;
  std::vector<std::int64_t> acc(b.cols(), 0);
  std::vector<int> touched;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    touched.clear();
    for (int ka = a.row_ptr()[i]; ka < a.row_ptr()[i + 1]; ++ka) {
      const int j = a.col_idx()[ka];
      const std::int64_t av = a.vals()[ka];
      for (int kb = b.row_ptr()[j]; kb < b.row_ptr()[j + 1]; ++kb) {
        const int c = b.col_idx()[kb];
        if (acc[c] == 0) touched.push_back(c);
        acc[c] += av * b.vals()[kb];
      }
    }
    for (int c : touched) {
      if (acc[c] != 0) out.push_back({int(i), c, acc[c]});
      acc[c] = 0;
    }
  }
  return SparseIntMatrix::from_triplets(a.rows(), b.cols(), std::move(out));
}

int cg_solve(const std::function<void(const Vector&, Vector&)>& apply, const Vector& rhs,
             Vector& x, double rel_tol, int max_iter) {
  const std::size_t n = rhs.size();
  if (x.size() != n) x.assign(n, 0.0);
  Vector r = rhs, ax(n);
  apply(x, ax);
  for (std::size_t i = 0; i < n; ++i) r[i] -= ax[i];
  Vector p = r, ap(n);
  double rr = dot(r, r);
  const double stop = rel_tol * rel_tol * std::max(dot(rhs, rhs), 1e-300);
  for (int it = 0; it < max_iter; ++it) {
    if (rr <= stop) return it;
    apply(p, ap);
    const double alpha = rr / dot(p, ap);
    axpy_inplace(alpha, p, x);
    axpy_inplace(-alpha, ap, r);
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  if (rr <= stop) return max_iter;
  throw NumericalFailure("cg_solve: no convergence");
}

}  // namespace wdirac
