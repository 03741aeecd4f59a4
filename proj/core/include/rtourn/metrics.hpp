// Inequality measures for prize schedules.
#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "rtourn/solver.hpp"
#include "rtourn/types.hpp"

namespace rtourn {

/// Gini coefficient G = sum_ij |v_i - v_j| / (2 n sum_i v_i), computed from
/// sorted values in O(n log n). For a unit budget this is (1/2n) sum |v_i - v_j|.
double gini(std::span<const double> v);

/// Gini of a schedule; requires the unit budget.
double gini(const PrizeSchedule& v);

struct LorenzPoint {
  double population = 0.0;
  double share = 0.0;
};

/// Cumulative prize share against population share, cumulating from the
/// smallest prize. `resolution` == 0 returns the n + 1 breakpoints; otherwise
/// the curve is resampled at `resolution` equally spaced population shares.
std::vector<LorenzPoint> lorenz(const PrizeSchedule& v, int resolution = 0);

/// 1 - 2 * area under the piecewise-linear Lorenz curve.
double gini_from_lorenz(std::span<const LorenzPoint> curve);

/// H_k = sum_{j=1}^k 1/j, H_0 = 0.
double harmonic(long long k);

/// True if `a` majorizes `b` (equal totals, partial sums of the sorted-
/// descending a dominate those of b).
bool majorizes(std::span<const double> a, std::span<const double> b, double tol = 1e-12);

struct GiniPoint {
  int n = 0;
  double gini = 0.0;
};

class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(int n, const std::string& what);
  int n() const noexcept { return n_; }

 private:
  int n_;
};

/// Solves every n in [n_min, n_max] (in parallel) and returns the Gini of
/// each robust schedule in order of n. Throws SolverFailure naming the first
/// n that fails to converge.
std::vector<GiniPoint> gini_sweep(int n_min, int n_max, const SolverConfig& cfg = {});

}  // namespace rtourn
