#pragma once

#include <optional>
#include <vector>

#include "sdfp/matrix.hpp"

namespace sdfp {

/// Result of a pivoted-LDLT positive-semidefiniteness probe. Ambiguous
/// means a pivot landed inside the tolerance band and the caller should
/// fall back to an eigenvalue test.
enum class PsdProbe { Psd, NotPsd, Ambiguous };

PsdProbe ldlt_psd_probe(const SymMatrix& s, double tol);

/// In-place lower Cholesky of a full row-major n x n buffer.
/// Returns false when a pivot drops below `floor`.
bool cholesky_in_place(std::vector<double>& a, int n, double floor);

/// Solves L L^T x = b given the Cholesky factor from cholesky_in_place.
void cholesky_solve(const std::vector<double>& chol, int n, std::vector<double>& b);

struct LeastSquaresResult {
  std::vector<double> solution; ///< minimum-norm least-squares solution
  double residual = 0.0;        ///< ||A x - b||_2
  int rank = 0;
  std::vector<std::vector<double>> nullspace; ///< orthonormal basis of ker A (optional)
};

/// Householder QR with column pivoting. rank_tol is relative to the
/// largest diagonal of R.
LeastSquaresResult least_squares(const Matrix& a, const std::vector<double>& b,
                                 double rank_tol, bool with_nullspace);

/// Modified Gram-Schmidt with a second re-orthogonalization pass.
/// Vectors whose remainder is shorter than drop_tol * (1 + original norm)
/// are pruned. Returns an orthonormal set spanning the input span.
std::vector<std::vector<double>> orthonormalize(const std::vector<std::vector<double>>& rows,
                                                double drop_tol);

/// Gauss-Jordan inverse with partial pivoting; throws SingularTransform
/// when a pivot falls below det_tol * max(1, max |entry|).
Matrix invert(const Matrix& m, double det_tol);

/// True when some LU pivot of m falls below det_tol * max(1, max |entry|).
bool is_singular(const Matrix& m, double det_tol);

} // namespace sdfp
