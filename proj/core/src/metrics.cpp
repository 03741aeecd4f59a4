#include "rtourn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

namespace rtourn {

double gini(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("gini of an empty schedule");
  std::vector<double> x(v.begin(), v.end());
  std::sort(x.begin(), x.end());
  const auto n = static_cast<double>(x.size());
  double total = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    total += x[i];
    weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * x[i];
  }
  if (!(total > 0.0)) throw std::invalid_argument("gini needs a positive total");
  return weighted / (n * total);
}

double gini(const PrizeSchedule& v) {
  if (std::abs(v.total() - 1.0) > kBudgetTolerance * v.n()) {
    throw std::invalid_argument("gini(PrizeSchedule) requires a unit budget");
  }
  return gini(v.values());
}

std::vector<LorenzPoint> lorenz(const PrizeSchedule& v, int resolution) {
  if (resolution < 0 || resolution == 1) {
    throw std::invalid_argument("lorenz resolution must be 0 or >= 2");
  }
  std::vector<double> x(v.values().begin(), v.values().end());
  std::sort(x.begin(), x.end());
  const double total = v.total();
  const auto n = static_cast<double>(x.size());
  std::vector<LorenzPoint> pts;
  pts.reserve(x.size() + 1);
  pts.push_back({0.0, 0.0});
  double cum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cum += x[i];
    pts.push_back({static_cast<double>(i + 1) / n, cum / total});
  }
  pts.back() = {1.0, 1.0};
  if (resolution == 0) return pts;

  std::vector<LorenzPoint> out(static_cast<std::size_t>(resolution));
  for (int k = 0; k < resolution; ++k) {
    const double p = static_cast<double>(k) / (resolution - 1);
    const double pos = p * n;
    const auto i = std::min(static_cast<std::size_t>(pos), x.size() - 1);
    const double w = pos - static_cast<double>(i);
    out[static_cast<std::size_t>(k)] = {p, (1.0 - w) * pts[i].share + w * pts[i + 1].share};
  }
  out.back() = {1.0, 1.0};
  return out;
}

double gini_from_lorenz(std::span<const LorenzPoint> curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += 0.5 * (curve[i].share + curve[i - 1].share) *
            (curve[i].population - curve[i - 1].population);
  }
  return 1.0 - 2.0 * area;
}

double harmonic(long long k) {
  if (k < 0) throw std::invalid_argument("harmonic number needs k >= 0");
  double h = 0.0;
  // Smallest terms first.
  for (long long j = k; j >= 1; --j) h += 1.0 / static_cast<double>(j);
  return h;
}

bool majorizes(std::span<const double> a, std::span<const double> b, double tol) {
  if (a.size() != b.size()) throw std::invalid_argument("majorizes needs equal lengths");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.rbegin(), x.rend());
  std::sort(y.rbegin(), y.rend());
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    if (sx < sy - tol) return false;
  }
  return std::abs(sx - sy) <= tol;
}

SolverFailure::SolverFailure(int n, const std::string& what)
    : std::runtime_error("n = " + std::to_string(n) + ": " + what), n_(n) {}

std::vector<GiniPoint> gini_sweep(int n_min, int n_max, const SolverConfig& cfg) {
  if (n_min < 2 || n_max < n_min) throw std::invalid_argument("gini_sweep needs 2 <= n_min <= n_max");
  std::vector<std::future<SolveReport>> jobs;
  for (int n = n_min; n <= n_max; ++n) {
    jobs.push_back(std::async(std::launch::async, [n, &cfg] { return solve_robust(n, cfg); }));
  }
  std::vector<GiniPoint> out;
  out.reserve(jobs.size());
  for (int n = n_min; n <= n_max; ++n) {
    const SolveReport rep = jobs[static_cast<std::size_t>(n - n_min)].get();
    if (!rep.converged) {
      throw SolverFailure(n, "solver did not converge (kkt residual " +
                                 std::to_string(rep.kkt_residual) + ")");
    }
    out.push_back({n, gini(rep.v_star)});
  }
  return out;
}

}  // namespace rtourn
