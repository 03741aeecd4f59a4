// Symmetric-equilibrium quantities of the rank-order tournament.
//
// With B_r the marginal probability of being ranked r or higher, the
// first-order condition reads
//   sum_r B_r (v_r - v_{r+1}) = int_0^1 a(z; d) m(z) dz = c'(x*).
#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rtourn/adversary.hpp"
#include "rtourn/quadrature.hpp"
#include "rtourn/types.hpp"

namespace rtourn {

/// c(x) = c0 x^p / p, so c'(x) = c0 x^(p-1).
struct CostFunction {
  double exponent = 2.0;
  double scale = 1.0;

  CostFunction() = default;
  CostFunction(double p, double c0);

  double cost(double x) const;
  double marginal(double x) const;
};

/// B_r = int K_r(z) m(z) dz for r = 1..n-1.
std::vector<double> compute_B(const QuantileDensity& m, int n, const QuadratureSpec& q = {});

/// int_0^1 a(z; d) m(z) dz
double marginal_benefit(const PrizeDifferentials& d, const QuantileDensity& m,
                        const QuadratureSpec& q = {});

/// Solves c'(x) = marginal benefit exactly for the power family.
double equilibrium_effort(const PrizeDifferentials& d, const QuantileDensity& m,
                          const CostFunction& c, const QuadratureSpec& q = {});
double effort_from_benefit(double marginal_benefit, const CostFunction& c);

/// beta_r = B_r - B_{r-1} (B_0 = 0, B_n = 0), length n.
std::vector<double> rank_probability_slopes(std::span<const double> B);

struct MonteCarloB {
  std::vector<double> estimate;
  std::vector<double> standard_error;
  std::int64_t samples = 0;
};

struct MonteCarloOptions {
  std::int64_t samples = 1'000'000;
  /// Deviator effort bump; NaN selects 1e-2 * reference length.
  double bump = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 20240601;
  int batches = 8;
  /// Richardson step 2 D(h/2) - D(h). Removes the O(h) bias that appears
  /// when the noise density jumps at a support endpoint.
  bool extrapolate = false;
};

/// Reference length used to validate the bump: the support length when
/// bounded, otherwise the 1%-99% quantile span.
double bump_reference_length(const NoiseDistribution& dist);

/// Estimates B_r as a central difference of P(rank <= r) for one deviator at
/// effort +-bump against n-1 opponents at the symmetric effort, with common
/// random numbers across the two bumps. Noise is drawn by inverse-CDF
/// sampling from `dist`. Batches use sub-seeds derived from (seed, batch) and
/// run in parallel; results are identical for a fixed (seed, batches).
MonteCarloB monte_carlo_B(const NoiseDistribution& dist, int n, const MonteCarloOptions& opts);

}  // namespace rtourn
