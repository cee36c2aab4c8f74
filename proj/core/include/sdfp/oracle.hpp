#pragma once

#include <optional>

#include "sdfp/config.hpp"
#include "sdfp/model.hpp"

namespace sdfp {

/// Outcome of the Gordan alternative on a subspace L of S_n: either a
/// nonzero PSD element of L (normalized to unit trace) or a positive
/// definite element of L^perp (unit trace). Exactly one side is solvable.
struct GordanOutcome {
  enum class Kind { Direction, Separator };
  Kind kind;
  SymMatrix witness;
};

/// Both sides of the alternative, solved unconditionally; used by the
/// exclusivity property tests. Values are sup lambda_min over the
/// unit-trace slice of L resp. L^perp (-inf when the slice is empty).
struct GordanCandidates {
  double direction_value = 0.0;
  std::optional<SymMatrix> direction;
  double separator_value = 0.0;
  std::optional<SymMatrix> separator;
};

GordanOutcome gordan_oracle(const AffineSubspace& l, const Tolerances& tol = {});
GordanCandidates gordan_candidates(const AffineSubspace& l, const Tolerances& tol = {});

/// Refines a noisy near-cone element to a unit-trace element of L ∩ K of
/// rank at most rank_cap (Gauss-Newton on the small eigenvalues, so
/// tangential cone/subspace contact does not stall it). Returns nullopt
/// when the iteration fails or the limit fails validation.
std::optional<SymMatrix> purify_cone_element(const AffineSubspace& l, const SymMatrix& a,
                                             int rank_cap, const Tolerances& tol);

/// sup lambda_min over {A in L : tr A = 1} with its optimizer; -inf when
/// the slice is empty. Certifies interior directions of projected
/// subspaces.
struct SliceOptimum {
  double value = 0.0;
  std::optional<SymMatrix> witness;
};
SliceOptimum max_min_unit_trace(const AffineSubspace& l, const Tolerances& tol = {});

/// sup { t : exists x in L + c with x - tI PSD } together with a witness
/// and the dual matrix Y (PSD, unit trace, Y ⊥ L, <Y,c> ~ value) recovered
/// from the final central point of the barrier solver.
struct LambdaStarResult {
  double value = 0.0;
  SymMatrix witness;
  SymMatrix dual;
  bool converged = false;
};

/// Requires the underlying subspace to admit no nonzero PSD element
/// (otherwise the supremum is infinite; guarded by a cap and NotBounded).
LambdaStarResult max_min_eigen_affine(const AffineSubspace& space, const Tolerances& tol = {});

/// A point of L + c that is PSD within tolerance, when one exists.
std::optional<SymMatrix> find_psd_point(const AffineSubspace& space, const Tolerances& tol = {});

} // namespace sdfp
