#pragma once

#include <variant>

#include "sdfp/procedures.hpp"

namespace sdfp {

/// Weak-status certificate: a maximal hyper feasible partition plus a
/// weak-feasibility certificate of its last subproblem.
struct WeakStatusCert {
  FPOutput fp;
  WeakFeasCert last;
};

/// Weak-infeasibility certificate: the full backward-procedure chain.
/// Replaying it needs only eigenvalue tests and least squares.
struct WeakInfeasCert {
  std::vector<ChainRound> chain;
};

/// Tagged union over all certifiable claims, carrying the tolerance at
/// which it was issued so verification is self-describing.
struct Certificate {
  double tol = 1e-7;
  std::variant<StrongFeasCert, WeakFeasCert, StrongInfeasCert, WeakStatusCert, WeakInfeasCert> body;

  const char* kind() const;
  /// Status the certificate claims; weak status reported as nullopt.
  std::optional<FeasibilityStatus> claimed_status() const;
};

/// Polynomial-time verifier: linear algebra and eigenvalue tests only, no
/// oracle solves. Returns false on any value-level violation; throws
/// DimensionMismatch / MalformedCertificate on structural breakage.
bool verify(const Problem& problem, const Certificate& cert, double tol);
inline bool verify(const Problem& problem, const Certificate& cert) {
  return verify(problem, cert, cert.tol);
}

/// Builds the certificate matching a finished classification chain.
/// Throws IncompleteChain when the chain lacks a terminal verdict.
Certificate build_certificate(FeasibilityStatus status, const std::vector<ChainRound>& chain,
                              const Tolerances& tol = {});

Certificate extract_certificate(const ClassificationResult& result, const Tolerances& tol = {});

/// Corollary-style weak-status certificate from a forward run whose last
/// subproblem carries a weak-feasibility certificate.
Certificate make_weak_status_certificate(const FPOutput& fp, const WeakFeasCert& last,
                                         const Tolerances& tol = {});

} // namespace sdfp
