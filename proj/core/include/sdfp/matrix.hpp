#pragma once

#include <vector>

#include "sdfp/errors.hpp"

namespace sdfp {

/// Number of entries in the upper triangle of an n x n symmetric matrix.
constexpr int tri_size(int n) { return n * (n + 1) / 2; }

/// Plain dense row-major matrix. Plumbing type for congruence transforms,
/// eigenvector collections and least-squares systems; not validated.
class Matrix {
public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  std::vector<double>& data() { return a_; }
  const std::vector<double>& data() const { return a_; }

  Matrix transposed() const;
  Matrix operator*(const Matrix& rhs) const;
  Matrix block(int i0, int j0, int r, int c) const;
  double max_abs() const;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

/// Dense real symmetric matrix; only the upper triangle is stored
/// (row-major), so symmetry is structural. Constructors and mutators
/// reject non-finite entries.
class SymMatrix {
public:
  SymMatrix() = default;
  explicit SymMatrix(int n);
  SymMatrix(int n, std::vector<double> upper);

  static SymMatrix identity(int n);
  static SymMatrix diag(const std::vector<double>& d);
  /// e_ii, or the symmetric unit e_ij + e_ji when i != j.
  static SymMatrix unit(int n, int i, int j);
  /// Symmetrizes (M + M^T)/2.
  static SymMatrix from_full(const Matrix& m);
  static SymMatrix from_svec(int n, const std::vector<double>& v);

  int dim() const { return n_; }

  double operator()(int i, int j) const {
    check_index(i, j);
    return a_[idx(i <= j ? i : j, i <= j ? j : i)];
  }
  void set(int i, int j, double v);

  const std::vector<double>& upper() const { return a_; }

  double trace() const;
  double frob() const;
  /// Trace inner product <A, B> = tr(A B).
  double inner(const SymMatrix& other) const;

  SymMatrix& operator+=(const SymMatrix& rhs);
  SymMatrix& operator-=(const SymMatrix& rhs);
  SymMatrix& operator*=(double s);
  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

  Matrix full() const;
  /// Isometric vectorization: diagonal entries as-is, off-diagonals
  /// scaled by sqrt(2), so the Euclidean dot equals the trace inner product.
  std::vector<double> svec() const;

  /// Principal submatrix starting at diagonal position i0, of the given size.
  SymMatrix block(int i0, int size) const;

private:
  size_t idx(int i, int j) const {
    // i <= j assumed
    return static_cast<size_t>(i) * n_ - static_cast<size_t>(i) * (i - 1) / 2 + (j - i);
  }
  void check_index(int i, int j) const;
  void check_finite() const;

  int n_ = 0;
  std::vector<double> a_;
};

} // namespace sdfp
