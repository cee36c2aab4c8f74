#include "sdfp/oracle.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "sdfp/errors.hpp"
#include "sdfp/linalg.hpp"
#include "sdfp/symlin.hpp"

namespace sdfp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BarrierOutput {
  double value = -kInf;
  SymMatrix witness;
  SymMatrix dual;
  bool converged = false;
  bool unbounded = false;
  double mu_final = 0.0;        // barrier parameter of the last centering
  std::vector<SymMatrix> trail; // central points at the last few mu levels
};

using Buf = std::vector<double>;

Buf to_buf(const SymMatrix& s) {
  const Matrix f = s.full();
  return f.data();
}

double buf_dot(const Buf& a, const Buf& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double buf_trace(const Buf& a, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[static_cast<size_t>(i) * n + i];
  return s;
}

// out = A * B for full row-major n x n buffers.
void buf_mul(const Buf& a, const Buf& b, Buf& out, int n) {
  std::fill(out.begin(), out.end(), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const double v = a[static_cast<size_t>(i) * n + k];
      if (v == 0.0) continue;
      const double* brow = &b[static_cast<size_t>(k) * n];
      double* orow = &out[static_cast<size_t>(i) * n];
      for (int j = 0; j < n; ++j) orow[j] += v * brow[j];
    }
  }
}

double logdet_from_chol(const Buf& chol, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::log(chol[static_cast<size_t>(i) * n + i]);
  return 2.0 * s;
}

// Maximizes t + mu*logdet(c + sum u_i B_i - t I) along the central path
// mu -> 0. Anchor and basis are given in S_n; the supremum of t equals
// sup lambda_min over the affine set. Stops early (unbounded=true) when t
// climbs past t_cap, which only happens when the subspace still contains
// a nonzero PSD direction.
BarrierOutput barrier_max_min(const SymMatrix& anchor, const std::vector<SymMatrix>& basis,
                              const Tolerances& tol, double t_cap) {
  const int n = anchor.dim();
  const int d = static_cast<int>(basis.size());
  BarrierOutput out;
  if (n == 0) throw DimensionMismatch("barrier solve on empty ambient space");

  if (d == 0) {
    // Fixed point: exact answer from the eigendecomposition.
    const auto eig = eigen_decompose(anchor);
    out.value = eig.values.front();
    out.witness = anchor;
    SymMatrix y(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) y.set(i, j, eig.vectors(i, 0) * eig.vectors(j, 0));
    out.dual = y;
    out.converged = true;
    out.trail.push_back(anchor);
    return out;
  }

  const double scale = 1.0 + anchor.frob();
  const double mu_min = tol.mu_min_rel * scale;

  std::vector<Buf> bfull(d);
  for (int i = 0; i < d; ++i) bfull[i] = to_buf(basis[i]);
  const Buf cfull = to_buf(anchor);

  std::vector<double> u(d, 0.0);
  double t = min_eigenvalue(anchor) - std::max(1.0, 0.1 * scale);

  const size_t nn = static_cast<size_t>(n) * n;
  Buf s(nn), chol(nn), sinv(nn), tmp(nn), mi(nn);
  std::vector<Buf> w(d, Buf(nn)), m(d, Buf(nn));

  auto assemble = [&](const std::vector<double>& uu, double tt, Buf& dst) {
    dst = cfull;
    for (int i = 0; i < d; ++i) {
      const double ui = uu[i];
      if (ui == 0.0) continue;
      for (size_t e = 0; e < nn; ++e) dst[e] += ui * bfull[i][e];
    }
    for (int i = 0; i < n; ++i) dst[static_cast<size_t>(i) * n + i] -= tt;
  };

  auto barrier_value = [&](const std::vector<double>& uu, double tt, double mu,
                           bool& feasible) -> double {
    assemble(uu, tt, tmp);
    chol = tmp;
    if (!cholesky_in_place(chol, n, 0.0)) {
      feasible = false;
      return -kInf;
    }
    feasible = true;
    return tt + mu * logdet_from_chol(chol, n);
  };

  double mu = scale;
  int newton_used = 0;
  bool converged_all = true;
  std::deque<SymMatrix> trail;
  bool aborted_unbounded = false;

  // One centering stage at fixed mu; grad_target < 0 uses the decrement
  // test only, otherwise the stage also polishes until the gradient in u
  // (the dual residual <Y, B_i>) drops below grad_target.
  auto center_stage = [&](double mu_stage, double grad_target, int iter_cap) -> bool {
    bool centered = false;
    const double mu = mu_stage;
    for (int it = 0; it < iter_cap; ++it) {
      if (newton_used >= tol.max_newton) break;
      ++newton_used;

      assemble(u, t, s);
      chol = s;
      if (!cholesky_in_place(chol, n, 0.0))
        throw Error("barrier solver lost interior feasibility");
      // Explicit inverse: n is small by design.
      {
        std::vector<double> e(n);
        for (int j = 0; j < n; ++j) {
          std::fill(e.begin(), e.end(), 0.0);
          e[j] = 1.0;
          cholesky_solve(chol, n, e);
          for (int i = 0; i < n; ++i) sinv[static_cast<size_t>(i) * n + j] = e[i];
        }
      }
      for (int i = 0; i < d; ++i) {
        buf_mul(sinv, bfull[i], w[i], n);
        buf_mul(w[i], sinv, m[i], n);
      }
      buf_mul(sinv, sinv, mi, n); // S^-2

      // Gradient and negative Hessian of t + mu*logdet(S).
      std::vector<double> g(d + 1, 0.0);
      for (int i = 0; i < d; ++i) g[i] = mu * buf_trace(w[i], n);
      g[d] = 1.0 - mu * buf_trace(sinv, n);

      Buf h(static_cast<size_t>(d + 1) * (d + 1), 0.0);
      for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
          const double v = mu * buf_dot(m[i], bfull[j]);
          h[static_cast<size_t>(i) * (d + 1) + j] = v;
          h[static_cast<size_t>(j) * (d + 1) + i] = v;
        }
        const double v = -mu * buf_trace(m[i], n);
        h[static_cast<size_t>(i) * (d + 1) + d] = v;
        h[static_cast<size_t>(d) * (d + 1) + i] = v;
      }
      h[static_cast<size_t>(d) * (d + 1) + d] = mu * buf_trace(mi, n);

      // Newton direction (-H) delta = g, with a jitter retry for
      // numerically flat directions.
      std::vector<double> delta = g;
      {
        Buf hc = h;
        double jitter = 0.0;
        double htrace = 0.0;
        for (int i = 0; i <= d; ++i) htrace += h[static_cast<size_t>(i) * (d + 1) + i];
        while (!cholesky_in_place(hc, d + 1, 0.0)) {
          jitter = jitter == 0.0 ? 1e-14 * std::max(1.0, htrace) : jitter * 100.0;
          hc = h;
          for (int i = 0; i <= d; ++i) hc[static_cast<size_t>(i) * (d + 1) + i] += jitter;
          if (jitter > 1e60) throw Error("barrier Newton system is singular");
        }
        cholesky_solve(hc, d + 1, delta);
      }

      double decrement = 0.0;
      for (int i = 0; i <= d; ++i) decrement += g[i] * delta[i];
      if (decrement < 0) decrement = 0;
      double gu_max = 0.0;
      for (int i = 0; i < d; ++i) gu_max = std::max(gu_max, std::fabs(g[i]));
      if (decrement * 0.5 <= 1e-11 * std::max(1.0, mu) &&
          (grad_target < 0 || gu_max <= grad_target)) {
        centered = true;
        break;
      }

      bool feas = false;
      const double f0 = barrier_value(u, t, mu, feas);
      double alpha = 1.0;
      std::vector<double> un(d);
      double tn = t;
      for (int bt = 0; bt < 60; ++bt) {
        for (int i = 0; i < d; ++i) un[i] = u[i] + alpha * delta[i];
        tn = t + alpha * delta[d];
        bool ok = false;
        const double f1 = barrier_value(un, tn, mu, ok);
        if (ok && f1 >= f0 + 0.25 * alpha * decrement) break;
        alpha *= 0.5;
        if (alpha < 1e-18) break;
      }
      if (alpha < 1e-18) break; // stuck; accept current point
      u = un;
      t = tn;

      if (t > t_cap) {
        aborted_unbounded = true;
        return false;
      }
    }
    return centered;
  };

  while (mu > mu_min) {
    const bool centered = center_stage(mu, -1.0, 40);
    if (aborted_unbounded) {
      out.unbounded = true;
      out.value = t;
      SymMatrix x = anchor;
      for (int i = 0; i < d; ++i) {
        SymMatrix b = basis[i];
        b *= u[i];
        x += b;
      }
      out.witness = x;
      out.dual = SymMatrix(n);
      out.converged = false;
      return out;
    }
    if (!centered && newton_used >= tol.max_newton) converged_all = false;

    SymMatrix x = anchor;
    for (int i = 0; i < d; ++i) {
      SymMatrix b = basis[i];
      b *= u[i];
      x += b;
    }
    trail.push_back(x);
    if (trail.size() > 3) trail.pop_front();

    if (newton_used >= tol.max_newton) {
      converged_all = false;
      break;
    }
    mu *= tol.mu_reduction;
  }

  // Tight polish at the final barrier parameter so the recovered dual is
  // orthogonal to the subspace at certificate quality.
  {
    const double mu_polish = mu / tol.mu_reduction;
    newton_used = std::min(newton_used, tol.max_newton - 25);
    if (newton_used < 0) newton_used = 0;
    center_stage(mu_polish, 1e-10 * scale, 25);
    if (aborted_unbounded) {
      out.unbounded = true;
      out.value = t;
      SymMatrix x = anchor;
      for (int i = 0; i < d; ++i) {
        SymMatrix b = basis[i];
        b *= u[i];
        x += b;
      }
      out.witness = x;
      out.dual = SymMatrix(n);
      out.converged = false;
      return out;
    }
  }

  assemble(u, t, s);
  chol = s;
  if (!cholesky_in_place(chol, n, 0.0)) throw Error("barrier solver lost feasibility at exit");
  {
    std::vector<double> e(n);
    for (int j = 0; j < n; ++j) {
      std::fill(e.begin(), e.end(), 0.0);
      e[j] = 1.0;
      cholesky_solve(chol, n, e);
      for (int i = 0; i < n; ++i) sinv[static_cast<size_t>(i) * n + j] = e[i];
    }
  }
  const double mu_final = mu / tol.mu_reduction; // last mu actually centered
  out.mu_final = mu_final;
  SymMatrix y(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      y.set(i, j, mu_final * 0.5 *
                      (sinv[static_cast<size_t>(i) * n + j] + sinv[static_cast<size_t>(j) * n + i]));
  const double ytr = y.trace();
  if (ytr > 0) y *= 1.0 / ytr;

  out.value = t;
  SymMatrix x = anchor;
  for (int i = 0; i < d; ++i) {
    SymMatrix b = basis[i];
    b *= u[i];
    x += b;
  }
  out.witness = x;
  out.dual = y;
  out.converged = converged_all;
  out.trail.assign(trail.begin(), trail.end());
  return out;
}

// Unit-trace slice of a subspace: a particular unit-trace element plus an
// orthonormal basis of the trace-zero part. Empty when trace vanishes on
// the whole subspace.
struct TraceSlice {
  bool empty = true;
  SymMatrix point;
  std::vector<SymMatrix> directions;
};

TraceSlice unit_trace_slice(const AffineSubspace& l) {
  TraceSlice out;
  const int n = l.n;
  const int d = l.dim();
  const SymMatrix id = SymMatrix::identity(n);
  const SymMatrix p = l.project_span(id);
  const double pn = p.frob();
  if (pn <= 1e-8 * std::sqrt(static_cast<double>(n))) return out; // trace == 0 on L

  out.empty = false;
  SymMatrix x0 = p;
  x0 *= 1.0 / (pn * pn); // tr(p) = ||p||^2
  out.point = x0;

  // Exact orthonormal basis of tau^perp in coefficient space via the
  // Householder reflector sending tau-hat to +-e_1; projecting standard
  // vectors instead would amplify rounding noise into spurious
  // trace-carrying directions.
  std::vector<double> tau(d);
  double tnorm = 0.0;
  for (int i = 0; i < d; ++i) {
    tau[i] = l.basis[i].trace();
    tnorm += tau[i] * tau[i];
  }
  tnorm = std::sqrt(tnorm);
  std::vector<double> v(d);
  for (int i = 0; i < d; ++i) v[i] = tau[i] / tnorm;
  v[0] += v[0] >= 0 ? 1.0 : -1.0;
  double vnorm2 = 0.0;
  for (double x : v) vnorm2 += x * x;
  for (int j = 1; j < d; ++j) {
    // Column j of H = I - 2 v v^T / (v^T v).
    std::vector<double> h(d, 0.0);
    h[j] = 1.0;
    const double f = 2.0 * v[j] / vnorm2;
    for (int i = 0; i < d; ++i) h[i] -= f * v[i];
    SymMatrix c(n);
    for (int i = 0; i < d; ++i) {
      SymMatrix b = l.basis[i];
      b *= h[i];
      c += b;
    }
    out.directions.push_back(c);
  }
  return out;
}

struct SideSolve {
  double value = -kInf;
  double mu_final = 0.0;
  std::optional<SymMatrix> candidate; // averaged central iterate, unit trace
  std::optional<SymMatrix> last;      // final witness
};

SideSolve solve_side(const AffineSubspace& l, const Tolerances& tol) {
  SideSolve out;
  const TraceSlice slice = unit_trace_slice(l);
  if (slice.empty) return out;
  const auto r = barrier_max_min(slice.point, slice.directions, tol, 2.0 + slice.point.frob());
  out.value = r.value;
  out.mu_final = r.mu_final;
  if (!r.trail.empty()) {
    SymMatrix avg(l.n);
    for (const auto& x : r.trail) avg += x;
    avg *= 1.0 / static_cast<double>(r.trail.size());
    out.candidate = avg;
  }
  out.last = r.witness;
  return out;
}

// Shared purification loop: alternate spectral clipping against exact
// projection back onto L (trace renormalized each pass). keep_rule decides
// which eigenvalues survive a pass; done when everything dropped is below
// a tenth of the rank cutoff.
template <typename KeepRule>
std::optional<SymMatrix> purify_loop(const AffineSubspace& l, const SymMatrix& a,
                                     KeepRule&& keep, int max_pass, const Tolerances& tol) {
  const int n = a.dim();
  SymMatrix cur = a;
  bool clean = false;
  for (int pass = 0; pass < max_pass && !clean; ++pass) {
    const auto eig = eigen_decompose(cur);
    const double lmax = std::max(std::fabs(eig.values.front()), std::fabs(eig.values.back()));
    // Leftover mass in the dropped spectrum becomes a floor on
    // approach-sequence distances, so cut deep; 1e-12 sits just above the
    // representation noise of congruence-transformed problem data.
    const double done_cut = 1e-12 * std::max(1.0, lmax);

    std::vector<char> kept(n, 0);
    keep(eig, kept);
    double ghost = 0.0;
    int kept_count = 0;
    for (int k = 0; k < n; ++k) {
      if (kept[k]) ++kept_count;
      else ghost = std::max(ghost, std::fabs(eig.values[k]));
    }
    if (ghost <= done_cut) {
      clean = true;
      break;
    }
    if (kept_count == 0) return std::nullopt;

    SymMatrix clipped(n);
    for (int k = 0; k < n; ++k) {
      if (!kept[k] || eig.values[k] <= 0) continue;
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          clipped.set(i, j,
                      clipped(i, j) + eig.values[k] * eig.vectors(i, k) * eig.vectors(j, k));
    }
    SymMatrix next = l.project_span(clipped);
    const double tr = next.trace();
    if (tr < 0.25 / std::max(1, n)) return std::nullopt;
    next *= 1.0 / tr;
    cur = next;
  }
  if (!clean) return std::nullopt; // stalled on an unremovable eigenvalue
  if (std::fabs(cur.trace() - 1.0) > tol.psd) return std::nullopt;
  if (min_eigenvalue(cur) < -tol.psd) return std::nullopt;
  if (l.off_span(cur) > tol.psd * (1.0 + cur.frob())) return std::nullopt;
  return cur;
}

// The central path reaches a degenerate optimal face only at O(sqrt(mu)),
// so the final iterate carries ghost eigenvalues of that order, partly
// inside L itself. Clip everything below the path accuracy.
std::optional<SymMatrix> clean_direction(const AffineSubspace& l, const SymMatrix& a,
                                         double mu_final, const Tolerances& tol) {
  const double path_noise = 50.0 * std::sqrt(std::max(mu_final, 0.0));
  return purify_loop(
      l, a,
      [&](const EigenDecomposition& eig, std::vector<char>& kept) {
        const double lmax =
            std::max(std::fabs(eig.values.front()), std::fabs(eig.values.back()));
        const double keep_cut =
            std::max(tol.rank * std::max(1.0, lmax), path_noise * (1.0 + lmax));
        for (size_t k = 0; k < eig.values.size(); ++k)
          if (eig.values[k] > keep_cut) kept[k] = 1;
      },
      120, tol);
}

} // namespace

std::optional<SymMatrix> purify_cone_element(const AffineSubspace& l, const SymMatrix& a,
                                             int rank_cap, const Tolerances& tol) {
  const int n = l.n;
  const int d = l.dim();
  if (rank_cap < 1 || d == 0) return std::nullopt;
  // rank_cap >= n leaves nothing to drive beyond the trace normalization.
  const int small = std::max(0, n - rank_cap);

  // Gauss-Newton on the coefficients: drive the (n - rank_cap) smallest
  // eigenvalues and the trace defect to zero. Alternating projections stall
  // when L touches the cone tangentially; root-finding on the eigenvalues
  // does not.
  std::vector<double> beta(d);
  for (int i = 0; i < d; ++i) beta[i] = l.basis[i].inner(a);

  auto assemble = [&](const std::vector<double>& b) {
    SymMatrix x(n);
    for (int i = 0; i < d; ++i) {
      if (b[i] == 0.0) continue;
      SymMatrix t = l.basis[i];
      t *= b[i];
      x += t;
    }
    return x;
  };
  auto residual_norm = [&](const SymMatrix& x, const EigenDecomposition& eig) {
    double s = 0.0;
    for (int k = 0; k < small; ++k) s += eig.values[k] * eig.values[k];
    const double td = x.trace() - 1.0;
    return std::sqrt(s + td * td);
  };

  SymMatrix x = assemble(beta);
  bool converged = false;
  double damping = -1.0; // initialized from the first residual
  for (int it = 0; it < 80; ++it) {
    const auto eig = eigen_decompose(x);
    const double lmax = std::max(std::fabs(eig.values.front()), std::fabs(eig.values.back()));
    const double done_cut = 1e-12 * std::max(1.0, lmax);
    const double r0 = residual_norm(x, eig);
    double ghost = 0.0;
    for (int k = 0; k < small; ++k) ghost = std::max(ghost, std::fabs(eig.values[k]));
    if (ghost <= done_cut && std::fabs(x.trace() - 1.0) <= 1e-12) {
      converged = true;
      break;
    }

    Matrix jac(small + 1, d);
    std::vector<double> rhs(small + 1);
    for (int k = 0; k < small; ++k) {
      rhs[k] = -eig.values[k];
      for (int i = 0; i < d; ++i) {
        // d lambda_k / d beta_i = q_k^T B_i q_k
        double v = 0.0;
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q)
            v += eig.vectors(p, k) * l.basis[i](p, q) * eig.vectors(q, k);
        jac(k, i) = v;
      }
    }
    rhs[small] = 1.0 - x.trace();
    for (int i = 0; i < d; ++i) jac(small, i) = l.basis[i].trace();

    // Levenberg-Marquardt: proximal steps keep the iteration on the branch
    // nearest the start, so large eigenvalues cannot drift into the driven
    // set and swap roles with a ghost.
    if (damping < 0) damping = std::max(r0, 1e-14);
    if (std::getenv("SDFP_PUR_TRACE"))
      fprintf(stderr, "[pur] it=%d r0=%.3e ghost=%.3e damping=%.3e done=%.3e\n", it, r0, ghost,
              damping, done_cut);
    bool improved = false;
    for (int attempt = 0; attempt < 25 && !improved; ++attempt) {
      Matrix aug(small + 1 + d, d);
      std::vector<double> augb(small + 1 + d, 0.0);
      for (int k = 0; k < small + 1; ++k) {
        for (int i = 0; i < d; ++i) aug(k, i) = jac(k, i);
        augb[k] = rhs[k];
      }
      const double root = std::sqrt(damping);
      for (int i = 0; i < d; ++i) aug(small + 1 + i, i) = root;
      const auto ls = least_squares(aug, augb, 1e-14, /*with_nullspace=*/false);
      std::vector<double> nb(d);
      for (int i = 0; i < d; ++i) nb[i] = beta[i] + ls.solution[i];
      const SymMatrix nx = assemble(nb);
      if (residual_norm(nx, eigen_decompose(nx)) < r0) {
        beta = std::move(nb);
        x = nx;
        damping = std::max(damping * 0.3, 1e-14);
        improved = true;
      } else {
        damping *= 10.0;
      }
    }
    if (!improved) break;
  }
  if (!converged) return std::nullopt;

  const double tr = x.trace();
  if (tr < 0.25 / std::max(1, n)) return std::nullopt;
  x *= 1.0 / tr;
  if (min_eigenvalue(x) < -tol.psd) return std::nullopt;
  if (l.off_span(x) > tol.psd * (1.0 + x.frob())) return std::nullopt;
  return x;
}

/// sup lambda_min over the unit-trace slice of a subspace, with the
/// optimizing element; value is -inf when the slice is empty.
SliceOptimum max_min_unit_trace(const AffineSubspace& l, const Tolerances& tol) {
  SliceOptimum out;
  out.value = -kInf;
  if (l.n == 0 || l.dim() == 0) return out;
  const TraceSlice slice = unit_trace_slice(l);
  if (slice.empty) return out;
  const auto r = barrier_max_min(slice.point, slice.directions, tol, 2.0 + slice.point.frob());
  out.value = r.value;
  out.witness = r.witness;
  return out;
}

namespace {

bool valid_direction(const AffineSubspace& l, const SymMatrix& a, const Tolerances& tol) {
  if (a.frob() < 0.5 / std::max(1, l.n)) return false; // unit trace PSD has norm >= tr/sqrt(n)
  if (std::fabs(a.trace() - 1.0) > tol.psd) return false;
  if (l.off_span(a) > tol.psd * (1.0 + a.frob())) return false;
  return min_eigenvalue(a) >= -tol.psd;
}

bool valid_separator(const AffineSubspace& l, const SymMatrix& b, const Tolerances& tol) {
  if (std::fabs(b.trace() - 1.0) > tol.psd) return false;
  if (l.project_span(b).frob() > tol.psd * (1.0 + b.frob())) return false;
  return min_eigenvalue(b) >= tol.pd;
}

} // namespace

GordanCandidates gordan_candidates(const AffineSubspace& l, const Tolerances& tol) {
  if (l.n == 0) throw DimensionMismatch("gordan_candidates on empty ambient space");
  GordanCandidates out;
  const int n = l.n;
  const SymMatrix id = SymMatrix::identity(n);
  const double root_n = std::sqrt(static_cast<double>(n));
  const SymMatrix p = l.project_span(id);

  SymMatrix comp_of_id = id;
  comp_of_id -= p;

  if (comp_of_id.frob() <= 1e-8 * root_n) {
    // I lies in L: interior direction immediately, separator side empty.
    SymMatrix a = id;
    a *= 1.0 / n;
    out.direction_value = 1.0 / n;
    out.direction = a;
    out.separator_value = -kInf;
    return out;
  }
  if (p.frob() <= 1e-8 * root_n) {
    // trace vanishes on L, so L ∩ K = {0}; I (minus its tiny L component)
    // is already a strict separator.
    SymMatrix b = comp_of_id;
    b *= 1.0 / b.trace();
    out.direction_value = -kInf;
    out.separator_value = min_eigenvalue(b);
    out.separator = b;
    return out;
  }

  const SideSolve s1 = solve_side(l, tol);
  out.direction_value = s1.value;
  if (s1.candidate && min_eigenvalue(*s1.candidate) >= min_eigenvalue(*s1.last))
    out.direction = s1.candidate;
  else
    out.direction = s1.last;

  const AffineSubspace lp = orthogonal_complement(l);
  const SideSolve s2 = solve_side(lp, tol);
  out.separator_value = s2.value;
  if (s2.last) out.separator = s2.last;
  return out;
}

GordanOutcome gordan_oracle(const AffineSubspace& l, const Tolerances& tol) {
  if (l.n == 0) return {GordanOutcome::Kind::Separator, SymMatrix(0)};

  const int n = l.n;
  const SymMatrix id = SymMatrix::identity(n);
  const double root_n = std::sqrt(static_cast<double>(n));
  const SymMatrix p = l.project_span(id);
  SymMatrix comp_of_id = id;
  comp_of_id -= p;

  if (comp_of_id.frob() <= 1e-8 * root_n) {
    SymMatrix a = id;
    a *= 1.0 / n;
    return {GordanOutcome::Kind::Direction, a};
  }
  if (p.frob() <= 1e-8 * root_n) {
    SymMatrix b = comp_of_id;
    b *= 1.0 / b.trace();
    if (valid_separator(l, b, tol)) return {GordanOutcome::Kind::Separator, b};
    throw NumericallyAmbiguous("gordan: zero-trace subspace but separator failed validation");
  }

  const SideSolve s1 = solve_side(l, tol);
  if (s1.value >= -tol.amb) {
    // Prefer the cleaned trail average: central iterates converge to a
    // maximal-rank element of the optimal face, and the cleanup strips the
    // O(sqrt(mu)) ghost spectrum that would inflate the rank.
    std::vector<std::optional<SymMatrix>> cands;
    if (s1.candidate) cands.push_back(clean_direction(l, *s1.candidate, s1.mu_final, tol));
    if (s1.last) cands.push_back(clean_direction(l, *s1.last, s1.mu_final, tol));
    cands.push_back(s1.candidate);
    cands.push_back(s1.last);
    for (const auto& cand : cands) {
      if (cand && valid_direction(l, *cand, tol))
        return {GordanOutcome::Kind::Direction, *cand};
    }
    if (s1.value > tol.amb)
      throw NumericallyAmbiguous("gordan: direction value " + std::to_string(s1.value) +
                                 " positive but witness failed validation (n=" +
                                 std::to_string(n) + ", dim=" + std::to_string(l.dim()) + ")");
  }

  const AffineSubspace lp = orthogonal_complement(l);
  const SideSolve s2 = solve_side(lp, tol);
  for (const auto& cand : {s2.last, s2.candidate}) {
    if (cand && valid_separator(l, *cand, tol))
      return {GordanOutcome::Kind::Separator, *cand};
  }
  throw NumericallyAmbiguous("gordan: neither witness validates; instance sits on the decision boundary");
}

LambdaStarResult max_min_eigen_affine(const AffineSubspace& space, const Tolerances& tol) {
  if (space.n == 0) throw DimensionMismatch("max_min_eigen_affine on empty ambient space");
  const double scale = 1.0 + space.anchor.frob();
  const auto r = barrier_max_min(space.anchor, space.basis, tol, 1e8 * scale);
  if (r.unbounded)
    throw NotBounded("sup lambda_min is unbounded: subspace still has a PSD direction");
  LambdaStarResult out;
  out.value = r.value;
  out.witness = r.witness;
  out.converged = r.converged;
  // Clean the dual exactly: project onto L^perp, renormalize the trace.
  SymMatrix y = r.dual;
  y -= space.project_span(y);
  const double ytr = y.trace();
  if (std::fabs(ytr) > 1e-300) y *= 1.0 / ytr;

  // Whenever the dual serves as a certificate (weak-feasibility separator
  // in the zero band, improving direction below it), it needs to be a
  // clean element of L^perp ∩ K; strip its sqrt(mu)-level ghost spectrum
  // the same way primal directions are purified.
  if (out.value <= tol.amb && space.n >= 2) {
    const auto eig = eigen_decompose(y);
    const double lmax = std::max(std::fabs(eig.values.front()), std::fabs(eig.values.back()));
    int rank_hi = 0;
    for (double v : eig.values)
      if (v > tol.rank * std::max(1.0, lmax)) ++rank_hi;
    rank_hi = std::min(rank_hi, space.n - 1);
    const bool zero_band = std::fabs(out.value) <= tol.amb;
    const double cscale = 1.0 + space.anchor.frob();
    const AffineSubspace lperp =
        orthogonal_complement(AffineSubspace::span_of(space.n, space.basis));
    for (int rc = rank_hi; rc >= 1; --rc) {
      const auto cand = purify_cone_element(lperp, y, rc, tol);
      if (!cand) continue;
      if (min_eigenvalue(*cand) < -0.1 * tol.cert) continue;
      const double pairing = cand->inner(space.anchor);
      // Zero band: the dual must separate, i.e. pair to ~0 with the anchor.
      // Below the band: it must stay an improving direction.
      if (zero_band && std::fabs(pairing) > 0.1 * tol.cert * cscale) continue;
      if (!zero_band && pairing > -0.5 * tol.amb) continue;
      y = *cand;
      break;
    }
  }
  out.dual = y;
  return out;
}

std::optional<SymMatrix> find_psd_point(const AffineSubspace& space, const Tolerances& tol) {
  if (space.n == 0) return SymMatrix(0);
  try {
    const auto r = max_min_eigen_affine(space, tol);
    if (r.value >= -tol.amb && min_eigenvalue(r.witness) >= -tol.psd) return r.witness;
    return std::nullopt;
  } catch (const NotBounded&) {
    // The objective climbed past the cap, so some iterate was strictly PD;
    // rerun cheaply with a tight cap to extract one.
    const auto r = barrier_max_min(space.anchor, space.basis, tol, 1.0);
    if (min_eigenvalue(r.witness) >= -tol.psd) return r.witness;
    throw;
  }
}

} // namespace sdfp
