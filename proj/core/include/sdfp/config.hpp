#pragma once

namespace sdfp {

/// Every tolerance and iteration knob used anywhere in the library.
/// One instance is threaded through all entry points; there are no
/// hidden numeric constants in the algorithms.
struct Tolerances {
  double eig = 1e-10;        ///< relative eigendecomposition residual target
  double rank = 1e-8;        ///< rank cutoff: eigenvalue > rank * max(1, ||A||_2)
  double lin = 1e-8;         ///< affine membership / slice emptiness residual scale
  double amb = 1e-7;         ///< classification decision band around zero
  double pd = 1e-9;          ///< strict positive-definiteness margin for separators
  double psd = 1e-7;         ///< slack when validating PSD witnesses
  double det = 1e-12;        ///< scaled pivot cutoff for congruence nonsingularity
  double cert = 1e-7;        ///< default certificate verification tolerance
  int max_newton = 200;      ///< barrier solver total Newton step budget
  double mu_reduction = 0.2; ///< barrier parameter decrease factor per outer step
  double mu_min_rel = 1e-13; ///< barrier termination, relative to problem scale
  double alpha_cap = 1e15;   ///< doubling-search ceiling for approach coefficients
};

} // namespace sdfp
