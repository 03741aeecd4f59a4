#include "rtourn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rtourn/types.hpp"

namespace rtourn {

namespace {

// Geometric grading depth for singular endpoint panels; the untouched
// remainder has width panel * 2^-kGradingLevels.
constexpr int kGradingLevels = 60;
// Below this gap 1 - z is no longer resolved in double precision.
constexpr double kMinTopGap = 1e-14;

GaussLegendreRule build_rule(int order) {
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 1; k <= order; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = order * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = 0.0;
    for (int k = 1; k <= order; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
    }
    dp = order * (x * p0 - p1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(order - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(order - 1 - i)] = w;
  }
  if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
  return rule;
}

// Accumulates w * f over one [a, b] panel into acc.
void add_panel(const GaussLegendreRule& rule, const VectorIntegrand& f, double a, double b,
               std::span<double> scratch, std::vector<double>& acc) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    f(mid + half * rule.nodes[k], scratch);
    const double w = half * rule.weights[k];
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * scratch[i];
  }
}

std::vector<double> composite(std::size_t dim, const VectorIntegrand& f,
                              const GaussLegendreRule& rule, int panels, EndpointMode mode) {
  std::vector<double> acc(dim, 0.0);
  std::vector<double> scratch(dim, 0.0);
  const double h = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    const double b = (p + 1 == panels) ? 1.0 : (p + 1) * h;
    const bool first = p == 0;
    const bool last = p + 1 == panels;
    if (mode == EndpointMode::singular && first) {
      // [h/2^(k+1), h/2^k] toward z = 0
      double hi = b;
      for (int k = 0; k < kGradingLevels; ++k) {
        add_panel(rule, f, 0.5 * hi, hi, scratch, acc);
        hi *= 0.5;
      }
      continue;
    }
    if (mode == EndpointMode::singular && last) {
      // [1 - g, 1 - g/2] toward z = 1; stops once nodes would round to 1.
      double gap = 1.0 - a;
      for (int k = 0; k < kGradingLevels && gap > kMinTopGap; ++k) {
        add_panel(rule, f, 1.0 - gap, 1.0 - 0.5 * gap, scratch, acc);
        gap *= 0.5;
      }
      continue;
    }
    add_panel(rule, f, a, b, scratch, acc);
  }
  return acc;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (order < 2) throw std::invalid_argument("quadrature order must be >= 2");
  if (panels < 1) throw std::invalid_argument("quadrature panels must be >= 1");
  if (!(refine_tol > 0.0)) throw std::invalid_argument("quadrature refine_tol must be > 0");
  if (max_doublings < 1) throw std::invalid_argument("quadrature max_doublings must be >= 1");
}

const GaussLegendreRule& GaussLegendreRule::of_order(int order) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<const GaussLegendreRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<const GaussLegendreRule>(build_rule(order));
  return *slot;
}

std::vector<double> integrate_unit(std::size_t dim, const VectorIntegrand& f,
                                   const QuadratureSpec& spec, EndpointMode mode) {
  spec.validate();
  const auto& rule = GaussLegendreRule::of_order(spec.order);
  int panels = spec.panels;
  // A single panel cannot be graded at both ends without overlap.
  if (mode == EndpointMode::singular && panels < 2) panels = 2;
  std::vector<double> prev = composite(dim, f, rule, panels, mode);
  double worst = 0.0;
  for (int k = 0; k < spec.max_doublings; ++k) {
    panels *= 2;
    std::vector<double> cur = composite(dim, f, rule, panels, mode);
    bool ok = true;
    worst = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double diff = std::abs(cur[i] - prev[i]);
      const double scale = std::max(1.0, std::abs(cur[i]));
      if (!std::isfinite(cur[i]) || diff > spec.refine_tol * scale) ok = false;
      worst = std::max(worst, diff / scale);
    }
    if (ok) return cur;
    prev = std::move(cur);
  }
  throw DivergentIntegral("quadrature failed to converge after " +
                          std::to_string(spec.max_doublings) +
                          " panel doublings (relative change " + std::to_string(worst) + ")");
}

std::vector<double> integrate_unit_fixed(std::size_t dim, const VectorIntegrand& f, int order,
                                         int panels) {
  if (order < 2 || panels < 1) throw std::invalid_argument("invalid fixed quadrature");
  return composite(dim, f, GaussLegendreRule::of_order(order), panels, EndpointMode::regular);
}

double integrate_unit(const std::function<double(double)>& f, const QuadratureSpec& spec,
                      EndpointMode mode) {
  const VectorIntegrand vf = [&f](double z, std::span<double> out) { out[0] = f(z); };
  return integrate_unit(1, vf, spec, mode)[0];
}

double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          int order) {
  const auto& rule = GaussLegendreRule::of_order(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    s += rule.weights[k] * f(mid + half * rule.nodes[k]);
  }
  return half * s;
}

}  // namespace rtourn
