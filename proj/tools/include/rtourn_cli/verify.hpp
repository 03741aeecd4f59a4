// Invariant battery behind `rtourn verify`.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtourn/solver.hpp"
#include "rtourn/types.hpp"

namespace rtourn::cli {

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct VerifyOptions {
  double hbar = 0.0;
  std::uint64_t seed = 20240601;
  int perturbations = 100;
  std::int64_t mc_samples = 1'000'000;
  /// Monte Carlo bump as a fraction of the support length.
  double bump_fraction = 1e-3;
  int grid = 2001;
  SolverConfig solver;
};

struct VerifySummary {
  int n = 0;
  double kkt_residual = 0.0;
  std::vector<CheckResult> checks;

  bool passed() const;
  std::vector<std::string> failed() const;
};

/// Checks, in order: budget, kkt, endpoint_support, entropy_binding,
/// minimized_value, minimax_perturbations, bounded_support, b_oracle.
///
/// b_oracle compares compute_B with an extrapolated Monte Carlo estimate on
/// the reconstructed distribution. The sigma band is 3 for a single rank and
/// is widened (Bonferroni) so that all n - 1 ranks together keep the 3-sigma
/// false-alarm rate.
VerifySummary run_verification(const PrizeDifferentials& d, const VerifyOptions& opts);

}  // namespace rtourn::cli
