#include "sdfp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sdfp {

PsdProbe ldlt_psd_probe(const SymMatrix& s, double tol) {
  const int n = s.dim();
  if (n == 0) return PsdProbe::Psd;
  Matrix a = s.full();
  std::vector<int> active(n);
  std::iota(active.begin(), active.end(), 0);

  // Diagonal pivoting: always eliminate on the largest remaining diagonal.
  // A diagonal below -tol disproves lambda_min >= -tol outright; a pivot
  // stuck near zero with live off-diagonal mass is left to the caller.
  for (int step = 0; step < n; ++step) {
    int rem = n - step;
    int best = step;
    double dmax = -1e300;
    for (int r = step; r < n; ++r) {
      const double d = a(active[r], active[r]);
      if (d > dmax) {
        dmax = d;
        best = r;
      }
    }
    std::swap(active[step], active[best]);
    const int p = active[step];

    if (dmax < -tol) return PsdProbe::NotPsd;
    if (dmax <= tol) {
      double off = 0.0;
      for (int r = step; r < n; ++r)
        for (int c = r + 1; c < n; ++c) off = std::max(off, std::fabs(a(active[r], active[c])));
      if (off <= tol / std::max(1, rem)) return PsdProbe::Psd;
      return PsdProbe::Ambiguous;
    }
    for (int r = step + 1; r < n; ++r) {
      const double f = a(active[r], p) / dmax;
      for (int c = step + 1; c < n; ++c) {
        a(active[r], active[c]) -= f * a(p, active[c]);
      }
    }
    for (int r = step + 1; r < n; ++r) a(active[r], p) = a(p, active[r]) = 0.0;
  }
  return PsdProbe::Psd;
}

bool cholesky_in_place(std::vector<double>& a, int n, double floor) {
  for (int j = 0; j < n; ++j) {
    double d = a[static_cast<size_t>(j) * n + j];
    for (int k = 0; k < j; ++k) {
      const double l = a[static_cast<size_t>(j) * n + k];
      d -= l * l;
    }
    if (d <= floor) return false;
    const double lj = std::sqrt(d);
    a[static_cast<size_t>(j) * n + j] = lj;
    for (int i = j + 1; i < n; ++i) {
      double v = a[static_cast<size_t>(i) * n + j];
      for (int k = 0; k < j; ++k)
        v -= a[static_cast<size_t>(i) * n + k] * a[static_cast<size_t>(j) * n + k];
      a[static_cast<size_t>(i) * n + j] = v / lj;
    }
  }
  // zero the strict upper triangle so the factor is unambiguous
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a[static_cast<size_t>(i) * n + j] = 0.0;
  return true;
}

void cholesky_solve(const std::vector<double>& chol, int n, std::vector<double>& b) {
  for (int i = 0; i < n; ++i) {
    double v = b[i];
    for (int k = 0; k < i; ++k) v -= chol[static_cast<size_t>(i) * n + k] * b[k];
    b[i] = v / chol[static_cast<size_t>(i) * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double v = b[i];
    for (int k = i + 1; k < n; ++k) v -= chol[static_cast<size_t>(k) * n + i] * b[k];
    b[i] = v / chol[static_cast<size_t>(i) * n + i];
  }
}

namespace {

// Back-substitution helper for the pivoted QR nullspace: solves
// R11 z = -R12 e_j for each free column j.
std::vector<std::vector<double>> qr_nullspace(const Matrix& r, const std::vector<int>& perm,
                                              int rank, int ncols) {
  std::vector<std::vector<double>> out;
  for (int f = rank; f < ncols; ++f) {
    std::vector<double> z(rank, 0.0);
    for (int i = rank - 1; i >= 0; --i) {
      double v = -r(i, f);
      for (int k = i + 1; k < rank; ++k) v -= r(i, k) * z[k];
      z[i] = v / r(i, i);
    }
    std::vector<double> x(ncols, 0.0);
    for (int i = 0; i < rank; ++i) x[perm[i]] = z[i];
    x[perm[f]] = 1.0;
    out.push_back(std::move(x));
  }
  return orthonormalize(out, 1e-12);
}

} // namespace

LeastSquaresResult least_squares(const Matrix& a, const std::vector<double>& b,
                                 double rank_tol, bool with_nullspace) {
  const int m = a.rows();
  const int n = a.cols();
  if (static_cast<int>(b.size()) != m) throw DimensionMismatch("least_squares rhs length");

  Matrix r = a;
  std::vector<double> qtb = b;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> colnorm(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += r(i, j) * r(i, j);
    colnorm[j] = s;
  }

  const int steps = std::min(m, n);
  int rank = 0;
  double rmax = 0.0;
  for (int k = 0; k < steps; ++k) {
    int best = k;
    for (int j = k + 1; j < n; ++j)
      if (colnorm[perm[j]] > colnorm[perm[best]]) best = j;
    std::swap(perm[k], perm[best]);
    const int pc = perm[k];

    double nrm = 0.0;
    for (int i = k; i < m; ++i) nrm += r(i, pc) * r(i, pc);
    nrm = std::sqrt(nrm);
    if (nrm <= rank_tol * std::max(1.0, rmax)) break;
    rmax = std::max(rmax, nrm);

    // Householder vector v stored in place of column pc below row k.
    double alpha = r(k, pc) >= 0 ? -nrm : nrm;
    double v0 = r(k, pc) - alpha;
    std::vector<double> v(m - k);
    v[0] = v0;
    for (int i = k + 1; i < m; ++i) v[i - k] = r(i, pc);
    double vnorm2 = 0.0;
    for (double t : v) vnorm2 += t * t;
    if (vnorm2 > 0) {
      for (int jj = k; jj < n; ++jj) {
        const int col = perm[jj];
        double dot = 0.0;
        for (int i = k; i < m; ++i) dot += v[i - k] * r(i, col);
        const double f = 2.0 * dot / vnorm2;
        for (int i = k; i < m; ++i) r(i, col) -= f * v[i - k];
      }
      double dotb = 0.0;
      for (int i = k; i < m; ++i) dotb += v[i - k] * qtb[i];
      const double fb = 2.0 * dotb / vnorm2;
      for (int i = k; i < m; ++i) qtb[i] -= fb * v[i - k];
    }
    r(k, pc) = alpha;
    for (int i = k + 1; i < m; ++i) r(i, pc) = 0.0;
    for (int j = k + 1; j < n; ++j) {
      double s = 0.0;
      for (int i = k + 1; i < m; ++i) s += r(i, perm[j]) * r(i, perm[j]);
      colnorm[perm[j]] = s;
    }
    ++rank;
  }

  // Rank refinement against the largest diagonal.
  double dmax = 0.0;
  for (int i = 0; i < rank; ++i) dmax = std::max(dmax, std::fabs(r(i, perm[i])));
  int eff = 0;
  for (int i = 0; i < rank; ++i) {
    if (std::fabs(r(i, perm[i])) > rank_tol * std::max(1.0, dmax)) ++eff;
    else break;
  }
  rank = eff;

  // Basic solution from the leading rank x rank triangle.
  Matrix rview(rank, n);
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < n; ++j) rview(i, j) = r(i, perm[j]);

  std::vector<double> z(rank, 0.0);
  for (int i = rank - 1; i >= 0; --i) {
    double v = qtb[i];
    for (int k = i + 1; k < rank; ++k) v -= rview(i, k) * z[k];
    z[i] = v / rview(i, i);
  }
  LeastSquaresResult out;
  out.rank = rank;
  out.solution.assign(n, 0.0);
  for (int i = 0; i < rank; ++i) out.solution[perm[i]] = z[i];

  auto ns = qr_nullspace(rview, perm, rank, n);
  // Minimum-norm correction: remove the nullspace component of the basic solution.
  for (const auto& nv : ns) {
    double dot = 0.0;
    for (int j = 0; j < n; ++j) dot += nv[j] * out.solution[j];
    for (int j = 0; j < n; ++j) out.solution[j] -= dot * nv[j];
  }
  if (with_nullspace) out.nullspace = std::move(ns);

  double res = 0.0;
  for (int i = 0; i < m; ++i) {
    double v = -b[i];
    for (int j = 0; j < n; ++j) v += a(i, j) * out.solution[j];
    res += v * v;
  }
  out.residual = std::sqrt(res);
  return out;
}

std::vector<std::vector<double>> orthonormalize(const std::vector<std::vector<double>>& rows,
                                                double drop_tol) {
  std::vector<std::vector<double>> q;
  for (const auto& row : rows) {
    std::vector<double> v = row;
    double orig = 0.0;
    for (double t : v) orig += t * t;
    orig = std::sqrt(orig);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : q) {
        double dot = 0.0;
        for (size_t t = 0; t < v.size(); ++t) dot += u[t] * v[t];
        for (size_t t = 0; t < v.size(); ++t) v[t] -= dot * u[t];
      }
    }
    double nrm = 0.0;
    for (double t : v) nrm += t * t;
    nrm = std::sqrt(nrm);
    if (nrm > drop_tol * (1.0 + orig)) {
      for (double& t : v) t /= nrm;
      q.push_back(std::move(v));
    }
  }
  return q;
}

Matrix invert(const Matrix& m, double det_tol) {
  if (m.rows() != m.cols()) throw DimensionMismatch("invert: matrix not square");
  const int n = m.rows();
  const double scale = std::max(1.0, m.max_abs());
  Matrix a = m;
  Matrix inv = Matrix::identity(n);
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(a(i, k)) > std::fabs(a(piv, k))) piv = i;
    if (std::fabs(a(piv, k)) <= det_tol * scale)
      throw SingularTransform("matrix is numerically singular");
    if (piv != k) {
      for (int j = 0; j < n; ++j) {
        std::swap(a(k, j), a(piv, j));
        std::swap(inv(k, j), inv(piv, j));
      }
    }
    const double d = a(k, k);
    for (int j = 0; j < n; ++j) {
      a(k, j) /= d;
      inv(k, j) /= d;
    }
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      const double f = a(i, k);
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        a(i, j) -= f * a(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

bool is_singular(const Matrix& m, double det_tol) {
  if (m.rows() != m.cols()) throw DimensionMismatch("is_singular: matrix not square");
  const int n = m.rows();
  const double scale = std::max(1.0, m.max_abs());
  Matrix a = m;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(a(i, k)) > std::fabs(a(piv, k))) piv = i;
    if (std::fabs(a(piv, k)) <= det_tol * scale) return true;
    if (piv != k)
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
    for (int i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return false;
}

} // namespace sdfp
