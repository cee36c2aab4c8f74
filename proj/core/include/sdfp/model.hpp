#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdfp/config.hpp"
#include "sdfp/matrix.hpp"

namespace sdfp {

/// The four mutually exclusive feasibility statuses of (K_n, L, c).
enum class FeasibilityStatus {
  StronglyFeasible,
  WeaklyFeasible,
  WeaklyInfeasible,
  StronglyInfeasible,
};

const char* to_string(FeasibilityStatus s);
std::optional<FeasibilityStatus> status_from_string(const std::string& s);
int status_exit_code(FeasibilityStatus s);

/// Affine set L + c inside S_n, held as an orthonormal basis of the
/// subspace L (trace inner product) plus an anchor c.
struct AffineSubspace {
  int n = 0;
  std::vector<SymMatrix> basis;
  SymMatrix anchor{0};

  /// Builds the canonical representation: the raw basis is orthonormalized
  /// and dependent elements are pruned by Gram rank.
  static AffineSubspace make(int n, const std::vector<SymMatrix>& raw_basis,
                             const SymMatrix& anchor, double prune_tol = 1e-10);
  /// Subspace through the origin.
  static AffineSubspace span_of(int n, const std::vector<SymMatrix>& raw_basis,
                                double prune_tol = 1e-10);

  int dim() const { return static_cast<int>(basis.size()); }

  /// Orthogonal projection of S onto the subspace L.
  SymMatrix project_span(const SymMatrix& s) const;
  /// ||S - proj_L(S)||_F.
  double off_span(const SymMatrix& s) const;
  /// x in L + c within tol * (1 + ||x||_F).
  bool contains_point(const SymMatrix& x, double tol) const;
};

/// A semidefinite feasibility problem: find x in (L + c) with x PSD.
struct Problem {
  AffineSubspace space;
  int n() const { return space.n; }
};

/// Upper-left k x k principal submatrix; pi_0 is the empty matrix.
SymMatrix pi(const SymMatrix& s, int k);
/// Lower-right (n-k) x (n-k) principal submatrix; pibar_n is empty.
SymMatrix pibar(const SymMatrix& s, int k);

enum class ProjectKind { Upper, Lower };

/// Applies pi_k (Upper) or pibar_k (Lower) to anchor and basis, pruning
/// dependent images so the result carries a minimal basis.
Problem project_problem(const Problem& p, ProjectKind kind, int k, double prune_tol = 1e-8);

/// Orthogonal complement of L in S_n under the trace inner product.
AffineSubspace orthogonal_complement(const AffineSubspace& l);

/// The auxiliary system (K_n, L^perp ∩ c^perp, -c/||c||^2), feasible exactly
/// when the input problem is strongly infeasible. Throws ZeroAnchor when
/// ||c|| is below tolerance (such a problem contains 0 and is feasible).
Problem strong_infeasibility_system(const Problem& p, const Tolerances& tol = {});

/// Affine set of x in L + c whose entries outside the upper-left m x m
/// block vanish, projected to S_m. Empty set encoded as nullopt; emptiness
/// is decided by least-squares residual > tol.lin * (1 + ||c||_F).
std::optional<Problem> slice_upper_corner(const Problem& p, int m, const Tolerances& tol = {});

/// Transforms the whole problem by the congruence S -> P^T S P.
Problem congruence_problem(const Matrix& p, const Problem& prob, const Tolerances& tol = {});

bool subspace_equal(const AffineSubspace& a, const AffineSubspace& b, double tol);
/// Same affine sets: equal spans and anchors differing by a span element.
bool affine_equal(const Problem& a, const Problem& b, double tol);

} // namespace sdfp
