#pragma once

#include <vector>

#include "sdfp/config.hpp"
#include "sdfp/linalg.hpp"
#include "sdfp/matrix.hpp"

namespace sdfp {

/// S = V diag(values) V^T with orthogonal V; values sorted ascending.
struct EigenDecomposition {
  std::vector<double> values;
  Matrix vectors;
};

/// Cyclic Jacobi eigendecomposition. Unconditionally stable for dense
/// symmetric matrices at the dimensions this library targets (n <= 50).
EigenDecomposition eigen_decompose(const SymMatrix& s);

/// lambda_min(S); +infinity for the empty matrix (infimum over an empty set).
double min_eigenvalue(const SymMatrix& s);

/// lambda_min(S) >= -tol. Fast path is the pivoted LDLT probe; ambiguous
/// pivots defer to the eigenvalue test, which is authoritative.
bool is_psd(const SymMatrix& s, double tol);

/// Frobenius distance to the PSD cone: sqrt(sum min(lambda_i, 0)^2).
double dist_to_psd(const SymMatrix& s);

/// Nearest PSD matrix in Frobenius norm (eigenvalue clipping).
SymMatrix project_to_psd(const SymMatrix& s);

/// C - B^T A^-1 B for M = [[A, B], [B^T, C]] with A the leading k x k block.
/// Throws SingularBlock unless lambda_min(A) > tol.pd.
SymMatrix schur_complement(const SymMatrix& m, int k, const Tolerances& tol = {});

/// P^T S P, symmetric by construction. Throws SingularTransform when P is
/// numerically singular under the scaled det cutoff.
SymMatrix congruence(const Matrix& p, const SymMatrix& s, const Tolerances& tol = {});

struct RankRevealing {
  Matrix P;     ///< orthogonal: P^T A P = diag(Ahat, 0), large eigenvalues leading
  int rank = 0; ///< size of the positive-definite block Ahat
};

/// Requires A PSD within tol (throws NotPsd otherwise). rank counts
/// eigenvalues above tol * max(1, ||A||_2).
RankRevealing rank_revealing_congruence(const SymMatrix& a, double tol);

/// (#positive, #negative, #zero) eigenvalue counts at cutoff
/// tol * max(1, ||S||_2).
struct Inertia {
  int positive = 0;
  int negative = 0;
  int zero = 0;
  bool operator==(const Inertia&) const = default;
};
Inertia inertia(const SymMatrix& s, double tol);

} // namespace sdfp
