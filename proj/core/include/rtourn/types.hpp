// Core value types shared by every rtourn module.
//
// Prize vectors are stored 0-based; rank r (1-based, as in the usual
// tournament notation) lives at index r - 1.
#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtourn {

/// Budget constraint tolerance for PrizeDifferentials / PrizeSchedule.
inline constexpr double kBudgetTolerance = 1e-12;

/// Thrown when a quadrature fails its refinement check, i.e. the integral
/// does not converge (non-integrable endpoint behaviour or a vanishing
/// integrand argument).
class DivergentIntegral : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws std::invalid_argument unless n >= 2.
void require_tournament_size(int n);

class PrizeSchedule;

/// Adjacent prize gaps d_r = v_r - v_{r+1}, r = 1..n-1.
///
/// Non-negativity is always enforced. The budget sum_r r * d_r = 1 is enforced
/// by `feasible`; `relaxed` skips it for solver iterates and rounded
/// reference values.
class PrizeDifferentials {
 public:
  static PrizeDifferentials feasible(std::vector<double> d);
  static PrizeDifferentials relaxed(std::vector<double> d);

  int n() const noexcept { return static_cast<int>(d_.size()) + 1; }
  std::span<const double> values() const noexcept { return d_; }
  /// 1-based rank accessor.
  double rank(int r) const { return d_.at(static_cast<std::size_t>(r - 1)); }

  /// sum_r r * d_r
  double budget() const noexcept;
  bool budget_exact() const noexcept;

  PrizeSchedule schedule() const;

 private:
  explicit PrizeDifferentials(std::vector<double> d) : d_(std::move(d)) {}
  std::vector<double> d_;
};

/// Rank prizes v_1 >= ... >= v_n = 0 summing to one.
class PrizeSchedule {
 public:
  static PrizeSchedule feasible(std::vector<double> v);
  /// Checks monotonicity, non-negativity and v_n = 0 only.
  static PrizeSchedule relaxed(std::vector<double> v);

  int n() const noexcept { return static_cast<int>(v_.size()); }
  std::span<const double> values() const noexcept { return v_; }
  double rank(int r) const { return v_.at(static_cast<std::size_t>(r - 1)); }
  double total() const noexcept;

  PrizeDifferentials differentials() const;

 private:
  friend class PrizeDifferentials;
  explicit PrizeSchedule(std::vector<double> v) : v_(std::move(v)) {}
  std::vector<double> v_;
};

}  // namespace rtourn
