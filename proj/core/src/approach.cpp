#include "sdfp/approach.hpp"

#include <cmath>

#include "sdfp/linalg.hpp"
#include "sdfp/symlin.hpp"

namespace sdfp {

SymMatrix choose_cprime(const FPOutput& fp, const Problem& p, const Tolerances& tol) {
  const auto feasible = find_psd_point(fp.last.space, tol);
  if (!feasible) throw LastInfeasible("last subproblem has no PSD point");
  return lift_from_last(p, fp, *feasible, tol);
}

namespace {

// One full doubling pass in transformed coordinates with per-stage budget
// eps/m; returns the coefficients, or throws when alpha_cap is exceeded.
std::vector<double> stage_pass(const FPOutput& fp, const SymMatrix& cprime, double eps,
                               const Tolerances& tol, SymMatrix& point_out) {
  const int m = fp.m();
  const auto ns = fp.prefix();
  std::vector<double> alphas(m, 0.0);
  SymMatrix point = cprime;
  const auto stage_dist = [&](int i, double alpha, const SymMatrix& base) {
    SymMatrix cand = fp.partition[i - 1];
    cand *= alpha;
    cand += base;
    return dist_to_psd(pibar(cand, ns[i - 1]));
  };
  for (int i = m; i >= 1; --i) {
    const double target = static_cast<double>(m - i + 1) * eps / m;
    double alpha = 1.0;
    while (stage_dist(i, alpha, point) >= target) {
      alpha *= 2.0;
      if (alpha > tol.alpha_cap)
        throw EpsNotReached("approach stage exceeded alpha_cap; check classification/tolerances");
    }
    // Trim the doubling overshoot: smaller coefficients keep the couplings
    // the outer stages must neutralize small.
    double lo = alpha / 2.0, hi = alpha;
    for (int b = 0; b < 30 && alpha > 1.0; ++b) {
      const double mid = 0.5 * (lo + hi);
      if (stage_dist(i, mid, point) < target) hi = mid;
      else lo = mid;
    }
    alpha = hi;
    SymMatrix step = fp.partition[i - 1];
    step *= alpha;
    point += step;
    alphas[i - 1] = alpha;
  }
  point_out = point;
  return alphas;
}

} // namespace

ApproachSequence build_sequence(const FPOutput& fp, const Problem& p, double eps,
                                const Tolerances& tol) {
  if (eps <= 0) throw Error("build_sequence: eps must be positive");
  if (fp.m() == 0)
    throw PreconditionViolated("build_sequence: no hyper feasible directions available");

  const SymMatrix cprime_t = choose_cprime(fp, p, tol);
  const Matrix pinv = invert(fp.P, tol.det);

  double eps_work = eps;
  for (int attempt = 0; attempt < 60; ++attempt) {
    SymMatrix point_t(p.n());
    const auto alphas = stage_pass(fp, cprime_t, eps_work, tol, point_t);
    const SymMatrix point = congruence(pinv, point_t, tol);
    const double achieved = dist_to_psd(point);
    if (achieved < eps) {
      ApproachSequence seq;
      seq.cprime = congruence(pinv, cprime_t, tol);
      seq.alphas = alphas;
      for (const auto& a : fp.partition) seq.directions.push_back(congruence(pinv, a, tol));
      seq.point = point;
      seq.achieved_dist = achieved;
      return seq;
    }
    // The congruence stretched distances; shrink the working budget.
    eps_work *= 0.5 * eps / achieved;
  }
  throw EpsNotReached("build_sequence: could not meet eps after budget shrinking");
}

std::vector<std::pair<double, double>> dwi_probe(const Problem& p, const SymMatrix& direction,
                                                 const SymMatrix& cprime,
                                                 const std::vector<double>& t_grid,
                                                 const Tolerances& tol) {
  if (direction.dim() != p.n() || cprime.dim() != p.n())
    throw DimensionMismatch("dwi_probe: dimension mismatch");
  if (p.space.off_span(direction) > tol.psd * (1.0 + direction.frob()))
    throw PreconditionViolated("dwi_probe: direction is not in L");
  if (min_eigenvalue(direction) < -tol.psd * (1.0 + direction.frob()))
    throw PreconditionViolated("dwi_probe: direction is not PSD");
  if (!p.space.contains_point(cprime, tol.lin))
    throw PreconditionViolated("dwi_probe: base point is not in L + c");

  std::vector<std::pair<double, double>> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    SymMatrix x = direction;
    x *= t;
    x += cprime;
    out.emplace_back(t, dist_to_psd(x));
  }
  return out;
}

} // namespace sdfp
