#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "sdfp/config.hpp"
#include "sdfp/errors.hpp"
#include "sdfp/model.hpp"
#include "sdfp/oracle.hpp"

namespace sdfp {

/// Output of the forward procedure: a maximal hyper feasible partition
/// A_1..A_m inside P^T L P, the block sizes k_i, the last subproblem
/// pibar_{k_1+..+k_m}(K_n, P^T L P, P^T c P), and the Gordan separator
/// certifying that no further nonzero PSD direction exists.
struct FPOutput {
  Matrix P; ///< accumulated congruence; orthogonal by construction here
  std::vector<int> ks;
  std::vector<SymMatrix> partition;
  Problem last;
  std::optional<SymMatrix> separator;

  int m() const { return static_cast<int>(ks.size()); }
  int total_k() const;
  /// N_0 = 0, N_1, ..., N_m prefix sums of ks.
  std::vector<int> prefix() const;
};

/// Checked single decomposition step: requires pi_k(L) to contain a PD
/// matrix (full-rank Gordan direction), returns pibar_k(p).
Problem decompose(const Problem& p, int k, const Tolerances& tol = {});

FPOutput forward_procedure(const Problem& p, const Tolerances& tol = {});

/// Verdict for a subproblem with no nonzero hyper feasible direction;
/// weak infeasibility cannot occur there, so the sign of sup lambda_min
/// decides among the remaining three statuses.
struct LastVerdict {
  FeasibilityStatus status; ///< never WeaklyInfeasible
  double value = 0.0;
  SymMatrix witness;
  SymMatrix dual;
};
LastVerdict classify_last(const Problem& last, const Tolerances& tol = {});

/// One facial-reduction step applied to a problem whose lower-right
/// (n-k)-block subproblem is weakly feasible: find w in
/// K ∩ pibar_k(L)^perp ∩ pibar_k(c)^perp, congruence-normalize it to
/// diag(0_l, w_hat) with w_hat PD, and slice the upper (k+l) corner.
struct FaceReduction {
  SymMatrix w;
  int k = 0;
  int l = 0;
  Matrix normalizer; ///< M = diag(I_k, Q), applied on top of the FP congruence
  bool slice_empty = false;
  std::optional<Problem> reduced; ///< pi_{k+l} of the sliced set, when nonempty
};
FaceReduction facial_reduction_step(const Problem& transformed, int k, const Tolerances& tol = {});

struct StrongFeasCert {
  SymMatrix x;
};
struct WeakFeasCert {
  SymMatrix x;
  SymMatrix y;
};
struct StrongInfeasCert {
  SymMatrix s;
};

/// One backward-procedure round: forward partition, verdict on the last
/// subproblem with its witnesses, and the facial-reduction record when the
/// round continues.
struct ChainRound {
  Problem problem;
  FPOutput fp;
  FeasibilityStatus last_status = FeasibilityStatus::StronglyFeasible;
  double last_value = 0.0;
  std::optional<StrongFeasCert> last_sf;
  std::optional<WeakFeasCert> last_wf;
  std::optional<StrongInfeasCert> last_si;
  std::optional<FaceReduction> reduction;
};

struct Certificate;

struct ClassificationResult {
  FeasibilityStatus status = FeasibilityStatus::StronglyFeasible;
  std::vector<ChainRound> chain;
  std::shared_ptr<const Certificate> certificate;
};

/// NumericallyAmbiguous with the rounds completed before the ambiguity hit.
class AmbiguousClassification : public NumericallyAmbiguous {
public:
  AmbiguousClassification(const std::string& msg, std::vector<ChainRound> partial)
      : NumericallyAmbiguous(msg), partial_chain(std::move(partial)) {}
  std::vector<ChainRound> partial_chain;
};

ClassificationResult backward_procedure(const Problem& p, const Tolerances& tol = {});

inline ClassificationResult classify(const Problem& p, const Tolerances& tol = {}) {
  return backward_procedure(p, tol);
}

/// diag(I_off, Q) block embedding.
Matrix block_embed(int off, const Matrix& q);
/// Zero-padded embedding of a symmetric block at the given diagonal offset.
SymMatrix sym_embed(int n, int off, const SymMatrix& s);

/// Feasible point of the round problem recovered from a feasible point of
/// its sliced successor: zero-pad and undo the round congruences.
SymMatrix unslice_point(const ChainRound& round, const SymMatrix& x_next,
                        const Tolerances& tol = {});

/// Minimum-norm lift of a point of the last subproblem into the
/// transformed affine set P^T (L + c) P.
SymMatrix lift_from_last(const Problem& p, const FPOutput& fp, const SymMatrix& x_last,
                         const Tolerances& tol = {});

/// Adds alpha_i A_i for i = m..1 (doubling each alpha) until every
/// intermediate lower-right block is strictly PD. Requires the
/// pibar_{N_m} block of `start` to be PD already.
SymMatrix boost_to_pd(const FPOutput& fp, const SymMatrix& start, const Tolerances& tol = {});

} // namespace sdfp
