#pragma once

#include <utility>
#include <vector>

#include "sdfp/procedures.hpp"

namespace sdfp {

/// An explicit eps-close approach to the PSD cone along the hyper feasible
/// partition directions, reported in the original coordinates.
struct ApproachSequence {
  SymMatrix cprime;                 ///< point of L + c with PSD innermost block
  std::vector<double> alphas;       ///< m strictly positive coefficients
  std::vector<SymMatrix> directions;///< partition directions mapped back into L
  SymMatrix point;                  ///< cprime + sum alpha_i * directions[i]
  double achieved_dist = 0.0;       ///< dist_to_psd(point), < requested eps
};

/// Point c' of P^T(L+c)P whose pibar_{N_m} block is PSD, from a feasible
/// point of the last subproblem. Throws LastInfeasible when none exists.
SymMatrix choose_cprime(const FPOutput& fp, const Problem& p, const Tolerances& tol = {});

/// Stage-by-stage doubling search meeting per-stage targets
/// (m-i+1) * eps / m, then back-transformed; the eps contract is enforced
/// in original coordinates with a fresh pass if the congruence distorted it.
ApproachSequence build_sequence(const FPOutput& fp, const Problem& p, double eps,
                                const Tolerances& tol = {});

/// dist_to_psd(t * direction + cprime) over the grid; diagnostic for
/// single-direction approachability.
std::vector<std::pair<double, double>> dwi_probe(const Problem& p, const SymMatrix& direction,
                                                 const SymMatrix& cprime,
                                                 const std::vector<double>& t_grid,
                                                 const Tolerances& tol = {});

} // namespace sdfp
