#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>

#include "sdfp/certs.hpp"
#include "sdfp/model.hpp"

namespace sdfp {

/// Deterministic cross-platform randomness: mt19937_64 (fully specified by
/// the standard) with hand-rolled uniform/normal transforms, since the
/// standard distributions are implementation-defined.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform() * (hi - lo + 1.0)) % (hi - lo + 1);
  }
  double normal();

private:
  std::mt19937_64 eng_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

Matrix random_orthogonal(int n, Rng& rng);
/// Random congruence with condition number at most 10^3, so planted ground
/// truth survives floating point.
Matrix random_well_conditioned(int n, Rng& rng);
SymMatrix random_sym(int n, Rng& rng);

struct GeneratedInstance {
  Problem problem;
  FeasibilityStatus truth;
  std::uint64_t seed = 0;
  std::string provenance;
  std::shared_ptr<const Certificate> planted; ///< null for weakly infeasible instances
};

/// Ground-truth instance with the requested status, dimension and dim(L).
/// Deterministic in the seed. Throws UnsatisfiableRequest when no instance
/// with those parameters exists.
GeneratedInstance generate(FeasibilityStatus status, int n, int dim_l, std::uint64_t seed,
                           const Tolerances& tol = {});

/// Largest dim(L) the weakly infeasible construction supports at dimension n.
int max_weakly_infeasible_dim(int n);

/// The embedded weakly infeasible family before the random congruence is
/// applied (identity-congruence form); used by pattern regression tests.
Problem weakly_infeasible_pattern(int n, int dim_l);

} // namespace sdfp
