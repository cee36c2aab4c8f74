#include "sdfp/matrix.hpp"

#include <cmath>
#include <string>

namespace sdfp {

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_)
    throw DimensionMismatch("matrix product: " + std::to_string(cols_) + " vs " +
                            std::to_string(rhs.rows_));
  Matrix out(rows_, rhs.cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int k = 0; k < cols_; ++k) {
      const double v = (*this)(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < rhs.cols_; ++j) out(i, j) += v * rhs(k, j);
    }
  }
  return out;
}

Matrix Matrix::block(int i0, int j0, int r, int c) const {
  if (i0 < 0 || j0 < 0 || i0 + r > rows_ || j0 + c > cols_)
    throw IndexOutOfRange("matrix block out of range");
  Matrix out(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out(i, j) = (*this)(i0 + i, j0 + j);
  return out;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::fabs(v));
  return m;
}

SymMatrix::SymMatrix(int n) : n_(n), a_(tri_size(n), 0.0) {
  if (n < 0) throw DimensionMismatch("negative dimension");
}

SymMatrix::SymMatrix(int n, std::vector<double> upper) : n_(n), a_(std::move(upper)) {
  if (n < 0) throw DimensionMismatch("negative dimension");
  if (static_cast<int>(a_.size()) != tri_size(n))
    throw DimensionMismatch("upper triangle has " + std::to_string(a_.size()) +
                            " entries, expected " + std::to_string(tri_size(n)));
  check_finite();
}

SymMatrix SymMatrix::identity(int n) {
  SymMatrix s(n);
  for (int i = 0; i < n; ++i) s.a_[s.idx(i, i)] = 1.0;
  return s;
}

SymMatrix SymMatrix::diag(const std::vector<double>& d) {
  SymMatrix s(static_cast<int>(d.size()));
  for (int i = 0; i < s.n_; ++i) s.set(i, i, d[i]);
  return s;
}

SymMatrix SymMatrix::unit(int n, int i, int j) {
  SymMatrix s(n);
  s.set(i, j, 1.0);
  return s;
}

SymMatrix SymMatrix::from_full(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("from_full: matrix not square");
  SymMatrix s(m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i; j < m.cols(); ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  return s;
}

SymMatrix SymMatrix::from_svec(int n, const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != tri_size(n)) throw DimensionMismatch("svec length mismatch");
  static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  SymMatrix s(n);
  size_t t = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j, ++t) s.set(i, j, i == j ? v[t] : v[t] * inv_sqrt2);
  return s;
}

void SymMatrix::set(int i, int j, double v) {
  check_index(i, j);
  if (!std::isfinite(v)) throw Error("non-finite matrix entry");
  a_[idx(i <= j ? i : j, i <= j ? j : i)] = v;
}

void SymMatrix::check_index(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_)
    throw IndexOutOfRange("entry (" + std::to_string(i) + "," + std::to_string(j) +
                          ") out of range for dimension " + std::to_string(n_));
}

void SymMatrix::check_finite() const {
  for (double v : a_)
    if (!std::isfinite(v)) throw Error("non-finite matrix entry");
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < n_; ++i) t += a_[idx(i, i)];
  return t;
}

double SymMatrix::frob() const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j < n_; ++j) {
      const double v = a_[idx(i, j)];
      s += (i == j ? 1.0 : 2.0) * v * v;
    }
  }
  return std::sqrt(s);
}

double SymMatrix::inner(const SymMatrix& other) const {
  if (n_ != other.n_) throw DimensionMismatch("inner product dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j)
      s += (i == j ? 1.0 : 2.0) * a_[idx(i, j)] * other.a_[idx(i, j)];
  return s;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& rhs) {
  if (n_ != rhs.n_) throw DimensionMismatch("sum dimension mismatch");
  for (size_t t = 0; t < a_.size(); ++t) a_[t] += rhs.a_[t];
  check_finite();
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& rhs) {
  if (n_ != rhs.n_) throw DimensionMismatch("difference dimension mismatch");
  for (size_t t = 0; t < a_.size(); ++t) a_[t] -= rhs.a_[t];
  check_finite();
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  if (!std::isfinite(s)) throw Error("non-finite scale");
  for (double& v : a_) v *= s;
  return *this;
}

Matrix SymMatrix::full() const {
  Matrix m(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) m(i, j) = m(j, i) = a_[idx(i, j)];
  return m;
}

std::vector<double> SymMatrix::svec() const {
  static const double sqrt2 = std::sqrt(2.0);
  std::vector<double> v(a_.size());
  size_t t = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j, ++t) v[t] = (i == j) ? a_[idx(i, j)] : sqrt2 * a_[idx(i, j)];
  return v;
}

SymMatrix SymMatrix::block(int i0, int size) const {
  if (size < 0 || i0 < 0 || i0 + size > n_) throw IndexOutOfRange("principal block out of range");
  SymMatrix s(size);
  for (int i = 0; i < size; ++i)
    for (int j = i; j < size; ++j) s.set(i, j, (*this)(i0 + i, i0 + j));
  return s;
}

} // namespace sdfp
