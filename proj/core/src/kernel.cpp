#include "rtourn/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rtourn {

namespace {

// Tail terms below this fraction of the running mass are dropped.
constexpr double kTailCutoff = 1e-30;

int binomial_mode(int trials, double p) {
  const int m = static_cast<int>(std::floor((trials + 1) * p));
  return std::clamp(m, 0, trials);
}

void check_z(double z) {
  if (!(z >= 0.0 && z <= 1.0)) {
    throw std::invalid_argument("z must lie in [0, 1], got " + std::to_string(z));
  }
}

}  // namespace

void binomial_pmf(int trials, double p, std::span<double> out) {
  if (trials < 0 || out.size() < static_cast<std::size_t>(trials) + 1) {
    throw std::invalid_argument("binomial_pmf: output span too small");
  }
  std::fill(out.begin(), out.begin() + trials + 1, 0.0);
  if (p <= 0.0) {
    out[0] = 1.0;
    return;
  }
  if (p >= 1.0) {
    out[static_cast<std::size_t>(trials)] = 1.0;
    return;
  }
  const double q = 1.0 - p;
  const double odds = p / q;
  const int mode = binomial_mode(trials, p);
  out[static_cast<std::size_t>(mode)] = 1.0;
  double mass = 1.0;
  double w = 1.0;
  for (int k = mode + 1; k <= trials; ++k) {
    w *= odds * static_cast<double>(trials - k + 1) / k;
    if (w < kTailCutoff * mass) break;
    out[static_cast<std::size_t>(k)] = w;
    mass += w;
  }
  w = 1.0;
  for (int k = mode - 1; k >= 0; --k) {
    w *= static_cast<double>(k + 1) / (odds * static_cast<double>(trials - k));
    if (w < kTailCutoff * mass) break;
    out[static_cast<std::size_t>(k)] = w;
    mass += w;
  }
  for (int k = 0; k <= trials; ++k) out[static_cast<std::size_t>(k)] /= mass;
}

void beta_kernels(int n, double z, std::span<double> out) {
  require_tournament_size(n);
  check_z(z);
  binomial_pmf(n - 2, 1.0 - z, out);
  for (int r = 0; r < n - 1; ++r) out[static_cast<std::size_t>(r)] *= (n - 1);
}

double eval_a_unchecked(double z, std::span<const double> d) {
  const int trials = static_cast<int>(d.size()) - 1;
  const double scale = static_cast<double>(d.size());
  if (z <= 0.0) return scale * d.back();
  if (z >= 1.0) return scale * d.front();
  const double p = 1.0 - z;
  const double odds = p / z;
  const int mode = binomial_mode(trials, p);
  double mass = 1.0;
  double acc = d[static_cast<std::size_t>(mode)];
  double w = 1.0;
  for (int k = mode + 1; k <= trials; ++k) {
    w *= odds * static_cast<double>(trials - k + 1) / k;
    if (w < kTailCutoff * mass) break;
    mass += w;
    acc += w * d[static_cast<std::size_t>(k)];
  }
  w = 1.0;
  for (int k = mode - 1; k >= 0; --k) {
    w *= static_cast<double>(k + 1) / (odds * static_cast<double>(trials - k));
    if (w < kTailCutoff * mass) break;
    mass += w;
    acc += w * d[static_cast<std::size_t>(k)];
  }
  return scale * acc / mass;
}

double eval_a(double z, const PrizeDifferentials& d) {
  check_z(z);
  return eval_a_unchecked(z, d.values());
}

KernelDerivatives kernel_derivatives(std::span<const double> d, const QuadratureSpec& q,
                                     std::span<const int> hessian_ranks) {
  const int n = static_cast<int>(d.size()) + 1;
  require_tournament_size(n);
  if (std::all_of(d.begin(), d.end(), [](double x) { return x == 0.0; })) {
    throw DivergentIntegral("a(z; d) vanishes identically (all differentials are zero)");
  }
  const std::size_t m = d.size();
  const std::size_t h = hessian_ranks.size();
  for (int r : hessian_ranks) {
    if (r < 1 || r > n - 1) throw std::invalid_argument("hessian rank out of range");
  }
  std::vector<double> kern(m);
  const VectorIntegrand f = [&](double z, std::span<double> out) {
    binomial_pmf(n - 2, 1.0 - z, kern);
    double a = 0.0;
    for (std::size_t k = 0; k < m; ++k) a += kern[k] * d[k];
    a *= (n - 1);
    const double inv = 1.0 / a;
    out[0] = std::log(a);
    for (std::size_t k = 0; k < m; ++k) out[1 + k] = (n - 1) * kern[k] * inv;
  };
  const std::vector<double> res = integrate_unit(1 + m, f, q);
  KernelDerivatives out;
  out.objective = res[0];
  out.gradient.assign(res.begin() + 1, res.end());
  if (h == 0) return out;

  // The Hessian only steers Newton steps, so one pass at twice the base
  // panel count suffices. Upper triangle only.
  std::vector<double> g(h);
  const VectorIntegrand fh = [&](double z, std::span<double> o) {
    binomial_pmf(n - 2, 1.0 - z, kern);
    double a = 0.0;
    for (std::size_t k = 0; k < m; ++k) a += kern[k] * d[k];
    a *= (n - 1);
    for (std::size_t i = 0; i < h; ++i) {
      g[i] = (n - 1) * kern[static_cast<std::size_t>(hessian_ranks[i] - 1)] / a;
    }
    std::size_t idx = 0;
    for (std::size_t i = 0; i < h; ++i) {
      const double gi = g[i];
      if (gi == 0.0) {
        std::fill(o.begin() + static_cast<std::ptrdiff_t>(idx),
                  o.begin() + static_cast<std::ptrdiff_t>(idx + h - i), 0.0);
        idx += h - i;
        continue;
      }
      for (std::size_t j = i; j < h; ++j) o[idx++] = -gi * g[j];
    }
  };
  const std::vector<double> tri = integrate_unit_fixed(h * (h + 1) / 2, fh, q.order, 2 * q.panels);
  out.hessian.assign(h * h, 0.0);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = i; j < h; ++j) {
      out.hessian[i * h + j] = tri[idx];
      out.hessian[j * h + i] = tri[idx];
      ++idx;
    }
  }
  return out;
}

double objective_W(const PrizeDifferentials& d, const QuadratureSpec& q, EndpointMode mode) {
  const auto dv = d.values();
  if (std::all_of(dv.begin(), dv.end(), [](double x) { return x == 0.0; })) {
    throw DivergentIntegral("a(z; d) vanishes identically (all differentials are zero)");
  }
  if (d.n() == 2) return std::log(dv[0]);
  return integrate_unit([&dv](double z) { return std::log(eval_a_unchecked(z, dv)); }, q, mode);
}

std::vector<double> gradient_l(const PrizeDifferentials& d, const QuadratureSpec& q) {
  const auto dv = d.values();
  const std::size_t m = dv.size();
  if (std::all_of(dv.begin(), dv.end(), [](double x) { return x == 0.0; })) {
    throw DivergentIntegral("a(z; d) vanishes identically (all differentials are zero)");
  }
  const int n = d.n();
  std::vector<double> kern(m);
  const VectorIntegrand f = [&](double z, std::span<double> out) {
    binomial_pmf(n - 2, 1.0 - z, kern);
    double a = 0.0;
    for (std::size_t k = 0; k < m; ++k) a += kern[k] * dv[k];
    for (std::size_t k = 0; k < m; ++k) out[k] = kern[k] / a;
  };
  return integrate_unit(m, f, q);
}

}  // namespace rtourn
