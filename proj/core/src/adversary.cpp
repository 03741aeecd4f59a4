#include "rtourn/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "rtourn/kernel.hpp"
#include "rtourn/solver.hpp"

namespace rtourn {

namespace {

constexpr double kUnboundedTop = 1e-6;   // grid stops at u = 1 - this when unbounded
constexpr double kExponentialTop = 1e-9; // F reaches 1 - this for the exponential table
constexpr double kRefineBand = 0.01;     // geometric refinement in the top 1%

// Uniform grid on [0, top] plus points 1 - band * 2^-k that lie above the
// last uniform interior point and at or below `top`.
std::vector<double> quantile_grid(int grid_size, double top) {
  if (grid_size < 3) throw std::invalid_argument("grid_size must be >= 3");
  std::vector<double> u;
  u.reserve(static_cast<std::size_t>(grid_size) + 64);
  const double h = 1.0 / (grid_size - 1);
  for (int i = 0; i < grid_size; ++i) {
    const double x = i * h;
    if (x <= top) u.push_back(x);
  }
  for (double gap = kRefineBand; gap > 1e-15; gap *= 0.5) {
    const double x = 1.0 - gap;
    if (x <= top) u.push_back(x);
  }
  u.push_back(top);
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end(),
                      [](double a, double b) { return std::abs(a - b) < 1e-15; }),
          u.end());
  return u;
}

double hermite(double t0, double t1, double s0, double s1, double h, double x) {
  // x in [0, 1] local coordinate, s = slopes dt/du
  const double x2 = x * x;
  const double x3 = x2 * x;
  return (2 * x3 - 3 * x2 + 1) * t0 + (x3 - 2 * x2 + x) * h * s0 + (-2 * x3 + 3 * x2) * t1 +
         (x3 - x2) * h * s1;
}

double inverse_slope(double f) {
  return (f > 0.0 && std::isfinite(1.0 / f)) ? 1.0 / f : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

EntropyBound::EntropyBound(double nats) : value_(nats) {
  if (!std::isfinite(nats)) throw std::invalid_argument("entropy bound must be finite");
}

const char* to_string(DensitySource s) {
  switch (s) {
    case DensitySource::adversarial:
      return "adversarial";
    case DensitySource::uniform:
      return "uniform";
    case DensitySource::exponential_limit:
      return "exponential-limit";
    case DensitySource::user_grid:
      return "user-grid";
  }
  return "unknown";
}

QuantileDensity::QuantileDensity(DensitySource source, std::function<double(double)> fn,
                                 double scale)
    : source_(source), fn_(std::move(fn)), scale_(scale) {
  if (!fn_) throw std::invalid_argument("quantile density needs a callable");
}

QuantileDensity QuantileDensity::uniform() {
  return {DensitySource::uniform, [](double) { return 1.0; }};
}

QuantileDensity QuantileDensity::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("exponential rate must be positive");
  }
  return {DensitySource::exponential_limit, [rate](double z) { return rate * (1.0 - z); }, rate};
}

QuantileDensity QuantileDensity::from_grid(std::vector<double> u, std::vector<double> m) {
  if (u.size() < 2 || u.size() != m.size()) {
    throw std::invalid_argument("grid density needs matching u and m vectors of size >= 2");
  }
  if (u.front() != 0.0 || u.back() != 1.0) {
    throw std::invalid_argument("grid density must span u = 0 to u = 1");
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i > 0 && !(u[i] > u[i - 1])) throw std::invalid_argument("grid u must increase");
    if (!(m[i] > 0.0) || !std::isfinite(m[i])) {
      throw std::invalid_argument("grid density values must be positive");
    }
  }
  auto fn = [u = std::move(u), m = std::move(m)](double z) {
    const auto it = std::upper_bound(u.begin(), u.end(), z);
    if (it == u.begin()) return m.front();
    if (it == u.end()) return m.back();
    const auto i = static_cast<std::size_t>(it - u.begin()) - 1;
    const double w = (z - u[i]) / (u[i + 1] - u[i]);
    return (1.0 - w) * m[i] + w * m[i + 1];
  };
  return {DensitySource::user_grid, std::move(fn)};
}

QuantileDensity adversarial_m(const PrizeDifferentials& d, EntropyBound h,
                              const QuadratureSpec& q) {
  const auto dv = d.values();
  if (!(dv.front() > 0.0) || !(dv.back() > 0.0)) {
    throw std::invalid_argument("adversarial density needs d_1 > 0 and d_{n-1} > 0");
  }
  const double lambda = std::exp(-h.nats() + objective_W(d, q));
  std::vector<double> copy(dv.begin(), dv.end());
  return {DensitySource::adversarial,
          [copy = std::move(copy), lambda](double z) {
            return lambda / eval_a_unchecked(std::clamp(z, 0.0, 1.0), copy);
          },
          lambda};
}

double entropy_of(const QuantileDensity& m, const QuadratureSpec& q) {
  return -integrate_unit([&m](double z) { return std::log(m(z)); }, q, EndpointMode::singular);
}

PerturbationCheck check_minimax_perturbations(const PrizeDifferentials& d, EntropyBound h,
                                              int trials, std::uint64_t seed,
                                              const QuadratureSpec& q) {
  constexpr int kModes = 6;
  if (trials < 1) throw std::invalid_argument("need at least one perturbation trial");
  const QuantileDensity m = adversarial_m(d, h, q);
  const auto dv = d.values();
  // a(z) m*(z) is the constant lambda, so only g needs integrating.
  const double baseline =
      integrate_unit([&](double z) { return eval_a_unchecked(z, dv) * m(z); }, q);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  PerturbationCheck out;
  out.baseline = baseline;
  out.trials = trials;
  out.worst_gap = std::numeric_limits<double>::infinity();
  std::vector<double> cs(kModes);
  std::vector<double> sn(kModes);
  for (int t = 0; t < trials; ++t) {
    for (int k = 0; k < kModes; ++k) {
      cs[static_cast<std::size_t>(k)] = 0.5 * gauss(rng) / (k + 1);
      sn[static_cast<std::size_t>(k)] = 0.5 * gauss(rng) / (k + 1);
    }
    const auto g = [&](double z) {
      double s = 0.0;
      for (int k = 0; k < kModes; ++k) {
        const double w = std::numbers::pi * (k + 1) * z;
        s += cs[static_cast<std::size_t>(k)] * std::cos(w) + sn[static_cast<std::size_t>(k)] * std::sin(w);
      }
      return s;
    };
    const double mean_g = integrate_unit(g, q);
    const double value = integrate_unit(
        [&](double z) { return eval_a_unchecked(z, dv) * m(z) * std::exp(g(z) - mean_g); }, q);
    out.worst_gap = std::min(out.worst_gap, value - baseline);
  }
  return out;
}

NoiseDistribution reconstruct_distribution(const QuantileDensity& m, double eps_lower,
                                           int grid_size, const QuadratureSpec& q) {
  if (!std::isfinite(eps_lower)) throw std::invalid_argument("eps_lower must be finite");
  const auto inv = [&m](double z) { return 1.0 / m(z); };
  bool bounded = true;
  try {
    const double total = integrate_unit(inv, q);
    bounded = std::isfinite(total);
  } catch (const DivergentIntegral&) {
    bounded = false;
  }

  const std::vector<double> u = quantile_grid(grid_size, bounded ? 1.0 : 1.0 - kUnboundedTop);
  NoiseDistribution out;
  out.bounded = bounded;
  out.support_lower = eps_lower;
  out.t.resize(u.size());
  out.cdf = u;
  out.pdf.resize(u.size());
  out.hazard.resize(u.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i > 0) acc += integrate_interval(inv, u[i - 1], u[i], q.order);
    out.t[i] = eps_lower + acc;
    out.pdf[i] = m(u[i]);
    out.hazard[i] = u[i] < 1.0 ? out.pdf[i] / (1.0 - u[i])
                               : std::numeric_limits<double>::infinity();
  }
  out.support_length = bounded ? acc : std::numeric_limits<double>::infinity();
  return out;
}

double exponential_limit_rate(EntropyBound h) { return std::exp(1.0 - h.nats()); }

NoiseDistribution exponential_limit(EntropyBound h, double eps_lower, int grid_size) {
  if (!std::isfinite(eps_lower)) throw std::invalid_argument("eps_lower must be finite");
  const double rate = exponential_limit_rate(h);
  const std::vector<double> u = quantile_grid(grid_size, 1.0 - kExponentialTop);
  NoiseDistribution out;
  out.bounded = false;
  out.support_lower = eps_lower;
  out.cdf = u;
  out.t.resize(u.size());
  out.pdf.resize(u.size());
  out.hazard.assign(u.size(), rate);
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.t[i] = eps_lower - std::log1p(-u[i]) / rate;
    out.pdf[i] = rate * (1.0 - u[i]);
  }
  return out;
}

double NoiseDistribution::quantile(double u) const {
  if (t.empty()) throw std::logic_error("empty noise distribution");
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
  if (u >= cdf.back()) {
    const double s = inverse_slope(pdf.back());
    return std::isfinite(s) ? t.back() + (u - cdf.back()) * s : t.back();
  }
  if (u <= cdf.front()) return t.front();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const auto i = static_cast<std::size_t>(it - cdf.begin()) - 1;
  const double h = cdf[i + 1] - cdf[i];
  const double x = (u - cdf[i]) / h;
  const double s0 = inverse_slope(pdf[i]);
  const double s1 = inverse_slope(pdf[i + 1]);
  if (!std::isfinite(s0) || !std::isfinite(s1)) return (1.0 - x) * t[i] + x * t[i + 1];
  return hermite(t[i], t[i + 1], s0, s1, h, x);
}

double NoiseDistribution::cdf_at(double x) const {
  if (t.empty()) throw std::logic_error("empty noise distribution");
  if (x <= t.front()) return x < t.front() ? 0.0 : cdf.front();
  if (x >= t.back()) return cdf.back();
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  const auto i = static_cast<std::size_t>(it - t.begin()) - 1;
  double lo = cdf[i];
  double hi = cdf[i + 1];
  for (int k = 0; k < 80; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (quantile(mid) < x) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double NoiseDistribution::pdf_at(double x) const {
  if (t.empty()) throw std::logic_error("empty noise distribution");
  if (x < t.front() || x > t.back()) return 0.0;
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  if (it == t.end()) return pdf.back();
  const auto i = static_cast<std::size_t>(it - t.begin()) - 1;
  const double w = (x - t[i]) / (t[i + 1] - t[i]);
  return (1.0 - w) * pdf[i] + w * pdf[i + 1];
}

N3SquareRootForm n3_square_root_form(EntropyBound h) {
  const PrizeDifferentials d = solve_n3_closed_form();
  // a(z) = alpha + beta z
  const double alpha = 2.0 * d.rank(2);
  const double beta = 2.0 * (d.rank(1) - d.rank(2));
  const double top = alpha + beta;
  const double w = (top * std::log(top) - alpha * std::log(alpha)) / beta - 1.0;
  const double c = std::exp(h.nats() - w);  // t - eps = c * (alpha u + beta u^2 / 2)
  N3SquareRootForm out;
  out.b = alpha / beta;
  out.k = 2.0 / (beta * c);
  out.support_length = c * (alpha + 0.5 * beta);
  return out;
}

NoiseDistribution closed_form_n3_distribution(EntropyBound h, double eps_lower, int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
  const N3SquareRootForm form = n3_square_root_form(h);
  NoiseDistribution out;
  out.bounded = true;
  out.support_lower = eps_lower;
  out.support_length = form.support_length;
  const auto size = static_cast<std::size_t>(grid_size);
  out.t.resize(size);
  out.cdf.resize(size);
  out.pdf.resize(size);
  out.hazard.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double s = form.support_length * static_cast<double>(i) / (grid_size - 1);
    const double root = std::sqrt(form.b * form.b + form.k * s);
    out.t[i] = eps_lower + s;
    out.cdf[i] = i + 1 == size ? 1.0 : std::min(1.0, root - form.b);
    out.pdf[i] = 0.5 * form.k / root;
    out.hazard[i] = out.cdf[i] < 1.0 ? out.pdf[i] / (1.0 - out.cdf[i])
                                     : std::numeric_limits<double>::infinity();
  }
  return out;
}

namespace {

struct N4Terms {
  double root;   // sqrt((t - 0.03518)^2 + 0.00345)
  double delta;  // -t + root + 0.03518
};

N4Terms n4_terms(double t) {
  if (!(t >= 0.0 && t <= kN4NormalisedSupport)) {
    throw std::domain_error("n = 4 closed form is defined on [0, 0.798], got t = " +
                            std::to_string(t));
  }
  const double root = std::sqrt((t - 0.03518) * (t - 0.03518) + 0.00345);
  return {root, -t + root + 0.03518};
}

}  // namespace

double n4_closed_form_cdf(double t) {
  const N4Terms v = n4_terms(t);
  const double c = std::cbrt(v.delta);
  return -0.8557 * c + 0.1267 + 0.1293 / c;
}

double n4_closed_form_pdf(double t) {
  const N4Terms v = n4_terms(t);
  const double c = std::cbrt(v.delta);
  const double num = -0.0431 * t + 0.0431 * v.root + 0.001516 +
                     c * c * (-0.2852 * t + 0.2852 * v.root + 0.01003);
  return num / (std::pow(v.delta, 4.0 / 3.0) * v.root);
}

NoiseDistribution closed_form_n4_distribution(EntropyBound h, double w_star, double eps_lower,
                                              int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
  const double scale = std::exp(h.nats() - w_star);
  NoiseDistribution out;
  out.bounded = true;
  out.support_lower = eps_lower;
  out.support_length = scale * kN4NormalisedSupport;
  const auto size = static_cast<std::size_t>(grid_size);
  out.t.resize(size);
  out.cdf.resize(size);
  out.pdf.resize(size);
  out.hazard.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double s =
        std::min(kN4NormalisedSupport, kN4NormalisedSupport * static_cast<double>(i) / (grid_size - 1));
    out.t[i] = eps_lower + scale * s;
    out.cdf[i] = n4_closed_form_cdf(s);
    out.pdf[i] = n4_closed_form_pdf(s) / scale;
    out.hazard[i] = out.cdf[i] < 1.0 ? out.pdf[i] / (1.0 - out.cdf[i])
                                     : std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace rtourn
