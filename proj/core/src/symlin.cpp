#include "sdfp/symlin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdfp/errors.hpp"

namespace sdfp {

namespace {

// One cyclic Jacobi sweep over the strict upper triangle.
double jacobi_sweep(Matrix& a, Matrix& v, int n) {
  double off = 0.0;
  for (int p = 0; p < n - 1; ++p) {
    for (int q = p + 1; q < n; ++q) {
      const double apq = a(p, q);
      if (apq == 0.0) continue;
      const double app = a(p, p);
      const double aqq = a(q, q);
      const double theta = (aqq - app) / (2.0 * apq);
      double t;
      if (std::fabs(theta) > 1e150) {
        t = 1.0 / (2.0 * theta);
      } else {
        t = 1.0 / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
      }
      const double c = 1.0 / std::sqrt(t * t + 1.0);
      const double s = t * c;
      const double tau = s / (1.0 + c);

      a(p, p) = app - t * apq;
      a(q, q) = aqq + t * apq;
      a(p, q) = a(q, p) = 0.0;
      for (int i = 0; i < n; ++i) {
        if (i != p && i != q) {
          const double aip = a(i, p);
          const double aiq = a(i, q);
          a(i, p) = a(p, i) = aip - s * (aiq + tau * aip);
          a(i, q) = a(q, i) = aiq + s * (aip - tau * aiq);
        }
        const double vip = v(i, p);
        const double viq = v(i, q);
        v(i, p) = vip - s * (viq + tau * vip);
        v(i, q) = viq + s * (vip - tau * viq);
      }
    }
  }
  for (int p = 0; p < n - 1; ++p)
    for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
  return std::sqrt(2.0 * off);
}

} // namespace

EigenDecomposition eigen_decompose(const SymMatrix& s) {
  const int n = s.dim();
  EigenDecomposition out;
  out.vectors = Matrix::identity(n);
  if (n == 0) return out;

  Matrix a = s.full();
  Matrix v = Matrix::identity(n);
  const double scale = std::max(1.0, s.frob());
  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = jacobi_sweep(a, v, n);
    if (off <= 1e-14 * scale) break;
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return a(x, x) < a(y, y); });

  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (int j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

double min_eigenvalue(const SymMatrix& s) {
  if (s.dim() == 0) return std::numeric_limits<double>::infinity();
  return eigen_decompose(s).values.front();
}

bool is_psd(const SymMatrix& s, double tol) {
  if (tol < 0) throw Error("is_psd: negative tolerance");
  switch (ldlt_psd_probe(s, tol)) {
    case PsdProbe::Psd:
      return true;
    case PsdProbe::NotPsd:
      return false;
    case PsdProbe::Ambiguous:
      break;
  }
  return min_eigenvalue(s) >= -tol;
}

double dist_to_psd(const SymMatrix& s) {
  if (s.dim() == 0) return 0.0;
  const auto eig = eigen_decompose(s);
  double d = 0.0;
  for (double lam : eig.values)
    if (lam < 0.0) d += lam * lam;
  return std::sqrt(d);
}

SymMatrix project_to_psd(const SymMatrix& s) {
  const int n = s.dim();
  if (n == 0) return s;
  const auto eig = eigen_decompose(s);
  SymMatrix out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double v = 0.0;
      for (int k = 0; k < n; ++k) {
        const double lam = eig.values[k];
        if (lam > 0.0) v += lam * eig.vectors(i, k) * eig.vectors(j, k);
      }
      out.set(i, j, v);
    }
  }
  return out;
}

SymMatrix schur_complement(const SymMatrix& m, int k, const Tolerances& tol) {
  const int n = m.dim();
  if (k < 0 || k > n) throw IndexOutOfRange("schur_complement: bad block size");
  if (k == 0) return m;
  const SymMatrix a = m.block(0, k);
  if (min_eigenvalue(a) <= tol.pd)
    throw SingularBlock("upper-left block is not positive definite");
  if (k == n) return SymMatrix(0);

  const int r = n - k;
  // Solve A X = B for the k x r coupling block.
  std::vector<double> chol(static_cast<size_t>(k) * k);
  {
    const Matrix af = a.full();
    chol.assign(af.data().begin(), af.data().end());
  }
  if (!cholesky_in_place(chol, k, 0.0))
    throw SingularBlock("upper-left block is not positive definite");

  Matrix x(k, r);
  std::vector<double> col(k);
  for (int j = 0; j < r; ++j) {
    for (int i = 0; i < k; ++i) col[i] = m(i, k + j);
    cholesky_solve(chol, k, col);
    for (int i = 0; i < k; ++i) x(i, j) = col[i];
  }
  SymMatrix out(r);
  for (int i = 0; i < r; ++i) {
    for (int j = i; j < r; ++j) {
      double v = m(k + i, k + j);
      for (int t = 0; t < k; ++t) v -= m(t, k + i) * x(t, j);
      out.set(i, j, v);
    }
  }
  return out;
}

SymMatrix congruence(const Matrix& p, const SymMatrix& s, const Tolerances& tol) {
  if (p.rows() != s.dim() || p.cols() != s.dim())
    throw DimensionMismatch("congruence: transform shape mismatch");
  if (is_singular(p, tol.det)) throw SingularTransform("congruence transform is singular");
  const Matrix f = p.transposed() * s.full() * p;
  return SymMatrix::from_full(f);
}

RankRevealing rank_revealing_congruence(const SymMatrix& a, double tol) {
  const int n = a.dim();
  const auto eig = eigen_decompose(a);
  const double lmin = n == 0 ? 0.0 : eig.values.front();
  if (lmin < -tol * (1.0 + a.frob()))
    throw NotPsd("rank_revealing_congruence: input is not PSD within tolerance");
  const double lmax = n == 0 ? 0.0 : std::fabs(eig.values.back());
  const double spectral = std::max(lmax, std::fabs(lmin));
  const double cutoff = tol * std::max(1.0, spectral);

  // Stable descending order so diagonal inputs keep their natural column
  // arrangement (identity transform for already-sorted matrices).
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return eig.values[x] > eig.values[y]; });

  RankRevealing out;
  out.rank = 0;
  for (int j = 0; j < n; ++j)
    if (eig.values[order[j]] > cutoff) ++out.rank;

  out.P = Matrix(n, n);
  for (int j = 0; j < out.rank; ++j)
    for (int i = 0; i < n; ++i) out.P(i, j) = eig.vectors(i, order[j]);

  // The kernel eigenvectors of a near-zero cluster are numerically
  // arbitrary; replace them by a deterministic identity-like basis of the
  // complement so the zero block's coordinates stay recognizable.
  std::vector<std::vector<double>> kernel;
  {
    std::vector<std::vector<double>> kept;
    for (int j = 0; j < out.rank; ++j) {
      std::vector<double> q(n);
      for (int i = 0; i < n; ++i) q[i] = out.P(i, j);
      kept.push_back(std::move(q));
    }
    for (int t = 0; t < n && static_cast<int>(kernel.size()) < n - out.rank; ++t) {
      std::vector<double> v(n, 0.0);
      v[t] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : kept) {
          double dot = 0.0;
          for (int i = 0; i < n; ++i) dot += q[i] * v[i];
          for (int i = 0; i < n; ++i) v[i] -= dot * q[i];
        }
        for (const auto& q : kernel) {
          double dot = 0.0;
          for (int i = 0; i < n; ++i) dot += q[i] * v[i];
          for (int i = 0; i < n; ++i) v[i] -= dot * q[i];
        }
      }
      double nrm = 0.0;
      for (double x : v) nrm += x * x;
      nrm = std::sqrt(nrm);
      if (nrm > 1e-6) {
        for (double& x : v) x /= nrm;
        kernel.push_back(std::move(v));
      }
    }
    // Complete from the eigenvector kernel if the sweep fell short.
    for (int j = out.rank; j < n && static_cast<int>(kernel.size()) < n - out.rank; ++j) {
      std::vector<double> v(n);
      for (int i = 0; i < n; ++i) v[i] = eig.vectors(i, order[j]);
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : kernel) {
          double dot = 0.0;
          for (int i = 0; i < n; ++i) dot += q[i] * v[i];
          for (int i = 0; i < n; ++i) v[i] -= dot * q[i];
        }
      }
      double nrm = 0.0;
      for (double x : v) nrm += x * x;
      nrm = std::sqrt(nrm);
      if (nrm > 1e-8) {
        for (double& x : v) x /= nrm;
        kernel.push_back(std::move(v));
      }
    }
    if (static_cast<int>(kernel.size()) != n - out.rank)
      throw Error("rank_revealing_congruence: kernel completion failed");
  }
  for (int j = 0; j < n - out.rank; ++j)
    for (int i = 0; i < n; ++i) out.P(i, out.rank + j) = kernel[j][i];
  return out;
}

Inertia inertia(const SymMatrix& s, double tol) {
  const auto eig = eigen_decompose(s);
  double spectral = 0.0;
  for (double v : eig.values) spectral = std::max(spectral, std::fabs(v));
  const double cutoff = tol * std::max(1.0, spectral);
  Inertia out;
  for (double v : eig.values) {
    if (v > cutoff) ++out.positive;
    else if (v < -cutoff) ++out.negative;
    else ++out.zero;
  }
  return out;
}

} // namespace sdfp
