#include "rtourn/types.hpp"

#include <cmath>

namespace rtourn {

void require_tournament_size(int n) {
  if (n < 2) {
    throw std::invalid_argument("tournament size must be >= 2, got " + std::to_string(n));
  }
}

PrizeDifferentials PrizeDifferentials::relaxed(std::vector<double> d) {
  if (d.empty()) {
    throw std::invalid_argument("prize differentials need at least one component (n >= 2)");
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] >= 0.0) || !std::isfinite(d[i])) {
      throw std::invalid_argument("prize differential d_" + std::to_string(i + 1) +
                                  " must be finite and non-negative");
    }
  }
  return PrizeDifferentials(std::move(d));
}

PrizeDifferentials PrizeDifferentials::feasible(std::vector<double> d) {
  auto out = relaxed(std::move(d));
  if (!out.budget_exact()) {
    throw std::invalid_argument("prize differentials violate the budget sum_r r*d_r = 1 (got " +
                                std::to_string(out.budget()) + ")");
  }
  return out;
}

double PrizeDifferentials::budget() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < d_.size(); ++i) s += static_cast<double>(i + 1) * d_[i];
  return s;
}

bool PrizeDifferentials::budget_exact() const noexcept {
  return std::abs(budget() - 1.0) <= kBudgetTolerance;
}

PrizeSchedule PrizeDifferentials::schedule() const {
  std::vector<double> v(d_.size() + 1, 0.0);
  for (std::size_t i = d_.size(); i-- > 0;) v[i] = v[i + 1] + d_[i];
  return PrizeSchedule(std::move(v));
}

PrizeSchedule PrizeSchedule::relaxed(std::vector<double> v) {
  if (v.size() < 2) throw std::invalid_argument("prize schedule needs n >= 2 entries");
  if (v.back() != 0.0) throw std::invalid_argument("last prize v_n must be 0");
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (!std::isfinite(v[i]) || v[i] < v[i + 1]) {
      throw std::invalid_argument("prize schedule must be finite and non-increasing");
    }
  }
  return PrizeSchedule(std::move(v));
}

PrizeSchedule PrizeSchedule::feasible(std::vector<double> v) {
  auto out = relaxed(std::move(v));
  if (std::abs(out.total() - 1.0) > kBudgetTolerance) {
    throw std::invalid_argument("prize schedule must sum to 1 (got " + std::to_string(out.total()) +
                                ")");
  }
  return out;
}

double PrizeSchedule::total() const noexcept {
  double s = 0.0;
  for (double x : v_) s += x;
  return s;
}

PrizeDifferentials PrizeSchedule::differentials() const {
  std::vector<double> d(v_.size() - 1);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = v_[i] - v_[i + 1];
  return PrizeDifferentials::relaxed(std::move(d));
}

}  // namespace rtourn
