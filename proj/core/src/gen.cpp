#include "sdfp/gen.hpp"

#include <cmath>

#include "sdfp/linalg.hpp"
#include "sdfp/symlin.hpp"

namespace sdfp {

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u1 = uniform();
  while (u1 <= 1e-300) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * 3.14159265358979323846 * u2;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

Matrix random_orthogonal(int n, Rng& rng) {
  while (true) {
    std::vector<std::vector<double>> cols;
    for (int j = 0; j < n; ++j) {
      std::vector<double> v(n);
      for (int i = 0; i < n; ++i) v[i] = rng.normal();
      cols.push_back(std::move(v));
    }
    const auto q = orthonormalize(cols, 1e-6);
    if (static_cast<int>(q.size()) != n) continue; // degenerate draw
    Matrix out(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) out(i, j) = q[j][i];
    return out;
  }
}

Matrix random_well_conditioned(int n, Rng& rng) {
  const Matrix u = random_orthogonal(n, rng);
  const Matrix v = random_orthogonal(n, rng);
  Matrix d(n, n);
  // Condition number <= 100, comfortably inside the 10^3 bound; keeps the
  // planted truth and the approach-sequence coefficients well away from
  // the doubling cap.
  for (int i = 0; i < n; ++i) d(i, i) = std::pow(10.0, rng.uniform(-1.0, 1.0));
  return u * d * v;
}

SymMatrix random_sym(int n, Rng& rng) {
  SymMatrix s(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s.set(i, j, rng.normal());
  return s;
}

namespace {

// Random dim-dimensional subspace of S_n orthogonal to the given matrices.
std::vector<SymMatrix> random_subspace(int n, int dim, Rng& rng,
                                       const std::vector<SymMatrix>& avoid) {
  std::vector<SymMatrix> basis;
  int guard = 0;
  while (static_cast<int>(basis.size()) < dim) {
    if (++guard > 100 * (dim + 1)) throw Error("random_subspace: could not reach dimension");
    SymMatrix cand = random_sym(n, rng);
    for (const auto& a : avoid) {
      const double f = a.inner(a);
      if (f <= 0) continue;
      SymMatrix t = a;
      t *= cand.inner(a) / f;
      cand -= t;
    }
    std::vector<SymMatrix> trial = basis;
    trial.push_back(cand);
    auto made = AffineSubspace::span_of(n, trial);
    if (made.dim() == static_cast<int>(basis.size()) + 1) basis = std::move(made.basis);
  }
  return basis;
}

SymMatrix random_span_shift(const std::vector<SymMatrix>& basis, int n, Rng& rng) {
  SymMatrix out(n);
  for (const auto& b : basis) {
    SymMatrix t = b;
    t *= rng.normal();
    out += t;
  }
  return out;
}


// P^T S P evaluated in extended precision, rounded once at the end.
SymMatrix congruence_ld(const Matrix& p, const SymMatrix& s) {
  const int n = s.dim();
  std::vector<long double> full(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) full[static_cast<size_t>(i) * n + j] = s(i, j);
  std::vector<long double> tmp(static_cast<size_t>(n) * n, 0.0L);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const long double v = p(k, i); // (P^T)_{i k}
      if (v == 0.0L) continue;
      for (int j = 0; j < n; ++j) tmp[static_cast<size_t>(i) * n + j] += v * full[static_cast<size_t>(k) * n + j];
    }
  std::vector<long double> res(static_cast<size_t>(n) * n, 0.0L);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const long double v = tmp[static_cast<size_t>(i) * n + k];
      if (v == 0.0L) continue;
      for (int j = 0; j < n; ++j) res[static_cast<size_t>(i) * n + j] += v * p(k, j);
    }
  SymMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      out.set(i, j, static_cast<double>(0.5L * (res[static_cast<size_t>(i) * n + j] +
                                                res[static_cast<size_t>(j) * n + i])));
  return out;
}

struct WiPattern {
  const char* name;
  int nb;
  std::vector<SymMatrix> basis;
  SymMatrix anchor;
};

// [[t, 1], [1, 0]]
WiPattern canonical_pattern() {
  WiPattern p{"canonical-2x2", 2, {SymMatrix::unit(2, 0, 0)}, SymMatrix::unit(2, 0, 1)};
  return p;
}

// [[t, 1, s], [1, s, 1], [s, 1, 0]]: two directions are needed to approach
// the cone; the lower-right 2x2 block is strongly infeasible for fixed s.
WiPattern two_direction_pattern() {
  SymMatrix bs(3);
  bs.set(1, 1, 1.0);
  bs.set(0, 2, 1.0);
  SymMatrix c(3);
  c.set(0, 1, 1.0);
  c.set(1, 2, 1.0);
  WiPattern p{"two-direction-3x3", 3, {SymMatrix::unit(3, 0, 0), bs}, c};
  return p;
}

// Five-variable 4x4 family whose forward partition has m = 2 and whose
// classification chain needs a facial-reduction round.
WiPattern chain_pattern() {
  SymMatrix bt = SymMatrix::unit(4, 0, 0);
  SymMatrix bv(4);
  bv.set(0, 1, 1.0);
  bv.set(1, 2, 1.0);
  SymMatrix bu(4);
  bu.set(0, 3, 1.0);
  bu.set(2, 2, 1.0);
  SymMatrix bs(4);
  bs.set(2, 3, 1.0);
  SymMatrix bz(4);
  bz.set(1, 1, 1.0);
  bz.set(1, 3, 1.0);
  SymMatrix c(4);
  c.set(0, 2, 1.0);
  c.set(1, 1, 2.0);
  c.set(1, 2, 1.0);
  c.set(1, 3, 1.0);
  c.set(2, 2, -1.0);
  WiPattern p{"chain-4x4", 4, {bt, bv, bu, bs, bz}, c};
  return p;
}

int augment_capacity(int n, int nb) { return tri_size(n - nb) + (n - nb); }

// Extra free cells that keep the pattern's infeasibility argument intact:
// anything inside the trailing block, plus row-0 couplings into it.
std::vector<SymMatrix> augment_cells(int n, int nb) {
  std::vector<SymMatrix> cells;
  for (int i = nb; i < n; ++i)
    for (int j = i; j < n; ++j) cells.push_back(SymMatrix::unit(n, i, j));
  for (int j = nb; j < n; ++j) cells.push_back(SymMatrix::unit(n, 0, j));
  return cells;
}

SymMatrix embed_top(int n, const SymMatrix& s) {
  SymMatrix out(n);
  for (int i = 0; i < s.dim(); ++i)
    for (int j = i; j < s.dim(); ++j) out.set(i, j, s(i, j));
  return out;
}

std::optional<WiPattern> pick_pattern(int n, int dim_l) {
  for (auto make : {&chain_pattern, &two_direction_pattern, &canonical_pattern}) {
    WiPattern p = make();
    const int d = static_cast<int>(p.basis.size());
    if (p.nb <= n && d <= dim_l && dim_l <= d + augment_capacity(n, p.nb)) return p;
  }
  return std::nullopt;
}

} // namespace

int max_weakly_infeasible_dim(int n) {
  if (n < 2) return 0;
  int best = 0;
  for (auto make : {&chain_pattern, &two_direction_pattern, &canonical_pattern}) {
    WiPattern p = make();
    if (p.nb > n) continue;
    best = std::max(best, static_cast<int>(p.basis.size()) + augment_capacity(n, p.nb));
  }
  return best;
}

Problem weakly_infeasible_pattern(int n, int dim_l) {
  auto pat = pick_pattern(n, dim_l);
  if (!pat)
    throw UnsatisfiableRequest("no weakly infeasible construction for these parameters");
  std::vector<SymMatrix> basis;
  for (const auto& b : pat->basis) basis.push_back(embed_top(n, b));
  const auto cells = augment_cells(n, pat->nb);
  const int extra = dim_l - static_cast<int>(pat->basis.size());
  for (int i = 0; i < extra; ++i) basis.push_back(cells[i]);
  return Problem{AffineSubspace::make(n, basis, embed_top(n, pat->anchor))};
}

GeneratedInstance generate(FeasibilityStatus status, int n, int dim_l, std::uint64_t seed,
                           const Tolerances& tol) {
  if (n < 2) throw UnsatisfiableRequest("generator requires n >= 2");
  const int full = tri_size(n);
  if (dim_l < 0 || dim_l > full - 1)
    throw UnsatisfiableRequest("dim_L outside [0, n(n+1)/2 - 1]");

  Rng rng(seed * 0x9e3779b97f4a7c15ULL + 0x243f6a8885a308d3ULL + seed);
  GeneratedInstance out;
  out.truth = status;
  out.seed = seed;

  switch (status) {
    case FeasibilityStatus::StronglyFeasible: {
      const auto basis = dim_l > 0 ? random_subspace(n, dim_l, rng, {}) : std::vector<SymMatrix>{};
      Matrix g(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
      SymMatrix x = SymMatrix::from_full(g.transposed() * g);
      x *= 1.0 / std::max(1.0, x.frob());
      SymMatrix bump = SymMatrix::identity(n);
      bump *= 0.3 + rng.uniform();
      x += bump;
      SymMatrix c = x;
      c -= random_span_shift(basis, n, rng);
      out.problem = Problem{AffineSubspace::make(n, basis, c)};
      out.provenance = "planted-pd-point";
      Certificate cert;
      cert.tol = tol.cert;
      cert.body = StrongFeasCert{x};
      out.planted = std::make_shared<Certificate>(std::move(cert));
      return out;
    }
    case FeasibilityStatus::WeaklyFeasible: {
      const int r = rng.uniform_int(1, n - 1);
      const Matrix q = random_orthogonal(n, rng);
      std::vector<double> xv(n, 0.0), yv(n, 0.0);
      for (int i = 0; i < r; ++i) xv[i] = rng.uniform(0.5, 1.5);
      for (int i = r; i < n; ++i) yv[i] = rng.uniform(0.5, 1.5);
      const SymMatrix x = congruence(q.transposed(), SymMatrix::diag(xv));
      SymMatrix y = congruence(q.transposed(), SymMatrix::diag(yv));
      y *= 1.0 / y.frob();
      const auto basis =
          dim_l > 0 ? random_subspace(n, dim_l, rng, {y}) : std::vector<SymMatrix>{};
      SymMatrix c = x;
      c -= random_span_shift(basis, n, rng);
      out.problem = Problem{AffineSubspace::make(n, basis, c)};
      out.provenance = "planted-boundary-point-and-separator";
      Certificate cert;
      cert.tol = tol.cert;
      cert.body = WeakFeasCert{x, y};
      out.planted = std::make_shared<Certificate>(std::move(cert));
      return out;
    }
    case FeasibilityStatus::StronglyInfeasible: {
      const int r = rng.uniform_int(1, n);
      const Matrix q = random_orthogonal(n, rng);
      std::vector<double> sv(n, 0.0);
      for (int i = 0; i < r; ++i) sv[i] = rng.uniform(0.5, 1.5);
      SymMatrix s = congruence(q.transposed(), SymMatrix::diag(sv));
      s *= 1.0 / s.frob();
      const auto basis =
          dim_l > 0 ? random_subspace(n, dim_l, rng, {s}) : std::vector<SymMatrix>{};
      SymMatrix c = random_sym(n, rng);
      SymMatrix corr = s;
      corr *= (c.inner(s) + 1.0) / s.inner(s);
      c -= corr;
      out.problem = Problem{AffineSubspace::make(n, basis, c)};
      out.provenance = "planted-improving-direction";
      Certificate cert;
      cert.tol = tol.cert;
      cert.body = StrongInfeasCert{s};
      out.planted = std::make_shared<Certificate>(std::move(cert));
      return out;
    }
    case FeasibilityStatus::WeaklyInfeasible: {
      if (dim_l < 1) throw UnsatisfiableRequest("weak infeasibility needs dim_L >= 1");
      if (dim_l > max_weakly_infeasible_dim(n))
        throw UnsatisfiableRequest("dim_L exceeds the weakly infeasible construction capacity");
      const Problem pattern = weakly_infeasible_pattern(n, dim_l);
      const Matrix t = random_well_conditioned(n, rng);
      // Extended-precision congruence: the instance data should be within
      // one double rounding of an exactly weakly infeasible problem, not
      // kappa^2 * eps away, or chained procedures inherit the drift.
      std::vector<SymMatrix> basis;
      for (const auto& b : pattern.space.basis) basis.push_back(congruence_ld(t, b));
      out.problem = Problem{AffineSubspace::make(n, basis, congruence_ld(t, pattern.space.anchor))};
      out.provenance = "embedded-pattern-with-congruence";
      return out;
    }
  }
  throw UnsatisfiableRequest("unknown status");
}

} // namespace sdfp
