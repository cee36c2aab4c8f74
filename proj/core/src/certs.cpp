#include "sdfp/certs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace {
inline bool cert_trace() {
  static const bool on = std::getenv("SDFP_CERT_TRACE") != nullptr;
  return on;
}
#define CERT_FAIL(...)   do {     if (cert_trace()) std::fprintf(stderr, "[verify] " __VA_ARGS__);     return false;   } while (0)
} // namespace

#include "sdfp/linalg.hpp"
#include "sdfp/symlin.hpp"

namespace sdfp {

const char* Certificate::kind() const {
  switch (body.index()) {
    case 0: return "strong_feasible";
    case 1: return "weak_feasible";
    case 2: return "strong_infeasible";
    case 3: return "weak_status";
    case 4: return "weak_infeasible";
  }
  return "?";
}

std::optional<FeasibilityStatus> Certificate::claimed_status() const {
  switch (body.index()) {
    case 0: return FeasibilityStatus::StronglyFeasible;
    case 1: return FeasibilityStatus::WeaklyFeasible;
    case 2: return FeasibilityStatus::StronglyInfeasible;
    case 4: return FeasibilityStatus::WeaklyInfeasible;
    default: return std::nullopt; // weak status covers two statuses
  }
}

namespace {

bool check_sf(const AffineSubspace& sp, const StrongFeasCert& c, double tol) {
  if (c.x.dim() != sp.n) throw DimensionMismatch("strong-feasibility certificate dimension");
  if (!sp.contains_point(c.x, tol)) CERT_FAIL("sf: x not in L+c\n");
  if (!(min_eigenvalue(c.x) > tol)) CERT_FAIL("sf: lambda_min(x)=%.3e\n", min_eigenvalue(c.x));
  return true;
}

bool check_wf(const AffineSubspace& sp, const WeakFeasCert& c, double tol) {
  if (c.x.dim() != sp.n || c.y.dim() != sp.n)
    throw DimensionMismatch("weak-feasibility certificate dimension");
  if (!sp.contains_point(c.x, tol)) CERT_FAIL("wf: x not in L+c\n");
  if (min_eigenvalue(c.x) < -tol) CERT_FAIL("wf: lambda_min(x)=%.3e\n", min_eigenvalue(c.x));
  const double yn = c.y.frob();
  if (std::fabs(yn - 1.0) > tol) CERT_FAIL("wf: ||y||=%.12f\n", yn);
  if (sp.project_span(c.y).frob() > tol * (1.0 + yn))
    CERT_FAIL("wf: proj_L(y)=%.3e\n", sp.project_span(c.y).frob());
  if (min_eigenvalue(c.y) < -tol) CERT_FAIL("wf: lambda_min(y)=%.3e\n", min_eigenvalue(c.y));
  if (std::fabs(c.y.inner(sp.anchor)) > tol * (1.0 + sp.anchor.frob()))
    CERT_FAIL("wf: <y,c>=%.3e\n", c.y.inner(sp.anchor));
  return true;
}

bool check_si(const AffineSubspace& sp, const StrongInfeasCert& c, double tol) {
  if (c.s.dim() != sp.n) throw DimensionMismatch("strong-infeasibility certificate dimension");
  const double sn = c.s.frob();
  if (min_eigenvalue(c.s) < -tol * (1.0 + sn))
    CERT_FAIL("si: lambda_min(s)=%.3e\n", min_eigenvalue(c.s));
  if (sp.project_span(c.s).frob() > tol * (1.0 + sn))
    CERT_FAIL("si: proj_L(s)=%.3e\n", sp.project_span(c.s).frob());
  if (std::fabs(c.s.inner(sp.anchor) + 1.0) > tol * (1.0 + sp.anchor.frob()))
    CERT_FAIL("si: <s,c>+1=%.3e\n", c.s.inner(sp.anchor) + 1.0);
  return true;
}

bool check_fp(const Problem& p, const FPOutput& fp, double tol) {
  const int n = p.n();
  if (fp.P.rows() != n || fp.P.cols() != n)
    throw DimensionMismatch("partition congruence dimension");
  if (fp.m() != static_cast<int>(fp.partition.size()))
    throw MalformedCertificate("partition/block-count mismatch");
  int total = 0;
  for (int k : fp.ks) {
    if (k <= 0) return false;
    total += k;
  }
  if (total > n) return false;
  if (is_singular(fp.P, 1e-12)) return false;

  const Problem q = congruence_problem(fp.P, p);
  const auto ns = fp.prefix();
  for (int i = 0; i < fp.m(); ++i) {
    const SymMatrix& a = fp.partition[i];
    if (a.dim() != n) throw DimensionMismatch("partition element dimension");
    if (q.space.off_span(a) > tol * (1.0 + a.frob()))
      CERT_FAIL("fp: A_%d off span %.3e\n", i, q.space.off_span(a));
    const SymMatrix d = pibar(a, ns[i]);
    const SymMatrix ahat = pi(d, fp.ks[i]);
    if (min_eigenvalue(ahat) <= tol)
      CERT_FAIL("fp: Ahat_%d lambda_min=%.3e\n", i, min_eigenvalue(ahat));
    SymMatrix resid = d;
    resid -= sym_embed(d.dim(), 0, ahat);
    if (resid.frob() > tol * (1.0 + a.frob()))
      CERT_FAIL("fp: A_%d shape residual %.3e\n", i, resid.frob());
  }

  const int last_n = n - total;
  if (last_n > 0) {
    if (!fp.separator) return false; // maximality not certified
    const SymMatrix& b = *fp.separator;
    if (b.dim() != last_n) throw DimensionMismatch("separator dimension");
    if (std::fabs(b.trace() - 1.0) > tol) CERT_FAIL("fp: separator trace %.12f\n", b.trace());
    if (min_eigenvalue(b) <= tol)
      CERT_FAIL("fp: separator lambda_min=%.3e\n", min_eigenvalue(b));
    const AffineSubspace last_sp = project_problem(q, ProjectKind::Lower, total).space;
    if (last_sp.project_span(b).frob() > tol * (1.0 + b.frob()))
      CERT_FAIL("fp: separator in-span mass %.3e\n", last_sp.project_span(b).frob());
  }
  return true;
}

Problem derived_last(const Problem& p, const FPOutput& fp) {
  const Problem q = congruence_problem(fp.P, p);
  return project_problem(q, ProjectKind::Lower, fp.total_k());
}

bool check_chain(const Problem& p, const std::vector<ChainRound>& chain, double tol) {
  if (chain.empty()) throw MalformedCertificate("empty chain");
  if (!affine_equal(chain.front().problem, p, std::max(tol, 1e-9))) return false;

  for (size_t j = 0; j < chain.size(); ++j) {
    const ChainRound& round = chain[j];
    const bool terminal = (j + 1 == chain.size());
    const int nj = round.problem.n();
    if (!check_fp(round.problem, round.fp, tol)) return false;
    const Problem last = derived_last(round.problem, round.fp);

    switch (round.last_status) {
      case FeasibilityStatus::StronglyFeasible:
        return false; // a weak-infeasibility chain never ends strongly feasible
      case FeasibilityStatus::StronglyInfeasible: {
        if (!terminal || j == 0) return false;
        if (!round.last_si) throw MalformedCertificate("terminal round lacks its dual certificate");
        if (!check_si(last.space, *round.last_si, tol)) return false;
        break;
      }
      case FeasibilityStatus::WeaklyFeasible: {
        if (!round.last_wf) throw MalformedCertificate("weak round lacks its last certificate");
        if (!check_wf(last.space, *round.last_wf, tol)) return false;
        if (round.fp.m() == 0) return false; // would make the problem itself weakly feasible
        if (!round.reduction) throw MalformedCertificate("weak round lacks its reduction record");
        const FaceReduction& red = *round.reduction;
        const int k = round.fp.total_k();
        if (red.k != k) return false;
        if (red.w.dim() != nj - k) throw DimensionMismatch("reduction direction dimension");
        if (red.l < 0 || red.l >= nj - k) return false;

        const double wn = red.w.frob();
        if (wn < 10 * tol) return false;
        if (min_eigenvalue(red.w) < -tol * (1.0 + wn)) return false;
        if (last.space.project_span(red.w).frob() > tol * (1.0 + wn)) return false;
        if (std::fabs(red.w.inner(last.space.anchor)) > tol * (1.0 + last.space.anchor.frob()))
          return false;

        const Matrix& m = red.normalizer;
        if (m.rows() != nj || m.cols() != nj) throw DimensionMismatch("normalizer dimension");
        double id_resid = 0.0;
        for (int a = 0; a < nj; ++a) {
          for (int b = 0; b < nj; ++b) {
            const bool off_block = (a < k) != (b < k);
            const double want = (a < k && b < k) ? (a == b ? 1.0 : 0.0) : m(a, b);
            const double diff = off_block ? m(a, b) : m(a, b) - want;
            id_resid += diff * diff;
          }
        }
        if (std::sqrt(id_resid) > tol * nj) return false;
        if (is_singular(m, 1e-12)) return false;

        const Matrix qblk = m.block(k, k, nj - k, nj - k);
        const SymMatrix wt = congruence(qblk, red.w);
        SymMatrix zero_part = pi(wt, red.l);
        if (zero_part.frob() > tol * (1.0 + wn)) return false;
        SymMatrix resid = wt;
        resid -= sym_embed(nj - k, red.l, pibar(wt, red.l));
        if (resid.frob() > tol * (1.0 + wn)) return false;
        if (min_eigenvalue(pibar(wt, red.l)) <= tol) return false;

        const Problem shifted = congruence_problem(m, congruence_problem(round.fp.P, round.problem));
        const auto sliced = slice_upper_corner(shifted, k + red.l);
        if (red.slice_empty) {
          if (sliced.has_value()) return false;
          if (!terminal) return false;
        } else {
          if (!sliced.has_value()) return false;
          if (terminal) return false; // must continue with the reduced problem
          if (!affine_equal(*sliced, chain[j + 1].problem, std::max(tol, 1e-7))) return false;
        }
        break;
      }
      case FeasibilityStatus::WeaklyInfeasible:
        throw MalformedCertificate("chain round claims weak infeasibility for its last subproblem");
    }
  }
  return true;
}

double positive_margin_floor(double current, double candidate) {
  return std::min(current, std::max(candidate / 4.0, 1e-10));
}

// Envelope tolerance: tight enough that every strict-positivity margin in
// the certificate clears it with room, never above the configured default.
double fp_margins(const Problem& p, const FPOutput& fp, double start) {
  double env = start;
  const auto ns = fp.prefix();
  for (int i = 0; i < fp.m(); ++i) {
    const SymMatrix ahat = pi(pibar(fp.partition[i], ns[i]), fp.ks[i]);
    env = positive_margin_floor(env, min_eigenvalue(ahat));
  }
  if (fp.separator && fp.separator->dim() > 0)
    env = positive_margin_floor(env, min_eigenvalue(*fp.separator));
  (void)p;
  return env;
}

} // namespace

bool verify(const Problem& problem, const Certificate& cert, double tol) {
  if (tol < 0) throw Error("verify: negative tolerance");
  if (const auto* c = std::get_if<StrongFeasCert>(&cert.body))
    return check_sf(problem.space, *c, tol);
  if (const auto* c = std::get_if<WeakFeasCert>(&cert.body))
    return check_wf(problem.space, *c, tol);
  if (const auto* c = std::get_if<StrongInfeasCert>(&cert.body))
    return check_si(problem.space, *c, tol);
  if (const auto* c = std::get_if<WeakStatusCert>(&cert.body)) {
    if (!check_fp(problem, c->fp, tol)) return false;
    const Problem last = derived_last(problem, c->fp);
    return check_wf(last.space, c->last, tol);
  }
  if (const auto* c = std::get_if<WeakInfeasCert>(&cert.body))
    return check_chain(problem, c->chain, tol);
  throw MalformedCertificate("unknown certificate variant");
}

Certificate build_certificate(FeasibilityStatus status, const std::vector<ChainRound>& chain,
                              const Tolerances& tol) {
  if (chain.empty()) throw IncompleteChain("empty classification chain");
  const ChainRound& first = chain.front();
  const ChainRound& final_round = chain.back();
  Certificate cert;
  cert.tol = tol.cert;

  switch (status) {
    case FeasibilityStatus::StronglyFeasible: {
      if (!first.last_sf) throw IncompleteChain("missing strong-feasibility witness");
      const SymMatrix lifted = lift_from_last(first.problem, first.fp, first.last_sf->x, tol);
      const SymMatrix boosted = boost_to_pd(first.fp, lifted, tol);
      const SymMatrix x = congruence(invert(first.fp.P, tol.det), boosted, tol);
      cert.tol = positive_margin_floor(cert.tol, min_eigenvalue(x));
      cert.body = StrongFeasCert{x};
      return cert;
    }
    case FeasibilityStatus::StronglyInfeasible: {
      if (!first.last_si) throw IncompleteChain("missing strong-infeasibility witness");
      const int n = first.problem.n();
      const SymMatrix embedded = sym_embed(n, first.fp.total_k(), first.last_si->s);
      SymMatrix s = congruence(first.fp.P.transposed(), embedded, tol);
      const double dot = s.inner(first.problem.space.anchor);
      if (dot >= 0) throw IncompleteChain("infeasibility witness lost its improving direction");
      s *= -1.0 / dot;
      cert.body = StrongInfeasCert{s};
      return cert;
    }
    case FeasibilityStatus::WeaklyFeasible: {
      // Feasible point of the terminal round, then walk it back out.
      SymMatrix x;
      if (final_round.last_status == FeasibilityStatus::StronglyFeasible) {
        if (!final_round.last_sf) throw IncompleteChain("missing terminal PD witness");
        const SymMatrix lifted =
            lift_from_last(final_round.problem, final_round.fp, final_round.last_sf->x, tol);
        const SymMatrix boosted = boost_to_pd(final_round.fp, lifted, tol);
        x = congruence(invert(final_round.fp.P, tol.det), boosted, tol);
      } else if (final_round.last_status == FeasibilityStatus::WeaklyFeasible &&
                 final_round.fp.m() == 0) {
        if (!final_round.last_wf) throw IncompleteChain("missing terminal PSD witness");
        x = final_round.last_wf->x;
      } else {
        throw IncompleteChain("weakly feasible verdict without a feasible terminal round");
      }
      for (size_t j = chain.size() - 1; j-- > 0;) x = unslice_point(chain[j], x, tol);

      SymMatrix y(first.problem.n());
      if (first.reduction) {
        const SymMatrix w_embedded =
            sym_embed(first.problem.n(), first.fp.total_k(), first.reduction->w);
        y = congruence(first.fp.P.transposed(), w_embedded, tol);
      } else {
        if (!first.last_wf) throw IncompleteChain("missing separating witness");
        y = first.last_wf->y;
      }
      const double yn = y.frob();
      if (yn <= 0) throw IncompleteChain("zero separating witness");
      y *= 1.0 / yn;
      cert.body = WeakFeasCert{x, y};
      return cert;
    }
    case FeasibilityStatus::WeaklyInfeasible: {
      double env = cert.tol;
      for (const auto& round : chain) {
        env = fp_margins(round.problem, round.fp, env);
        if (round.reduction) {
          const auto rr_w = pibar(congruence(round.reduction->normalizer.block(
                                                 round.reduction->k, round.reduction->k,
                                                 round.problem.n() - round.reduction->k,
                                                 round.problem.n() - round.reduction->k),
                                             round.reduction->w),
                                  round.reduction->l);
          env = positive_margin_floor(env, min_eigenvalue(rr_w));
        }
      }
      cert.tol = env;
      cert.body = WeakInfeasCert{chain};
      return cert;
    }
  }
  throw IncompleteChain("unknown status");
}

Certificate extract_certificate(const ClassificationResult& result, const Tolerances& tol) {
  return build_certificate(result.status, result.chain, tol);
}

Certificate make_weak_status_certificate(const FPOutput& fp, const WeakFeasCert& last,
                                         const Tolerances& tol) {
  Certificate cert;
  cert.tol = tol.cert;
  Problem dummy; // margins depend only on the partition blocks
  cert.tol = fp_margins(dummy, fp, cert.tol);
  cert.body = WeakStatusCert{fp, last};
  return cert;
}

} // namespace sdfp
