#include "rtourn/equilibrium.hpp"

#include <cmath>
#include <future>
#include <random>
#include <stdexcept>
#include <string>

#include "rtourn/kernel.hpp"

namespace rtourn {

CostFunction::CostFunction(double p, double c0) : exponent(p), scale(c0) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("cost exponent p must be > 1");
  if (!(c0 > 0.0) || !std::isfinite(c0)) throw std::invalid_argument("cost scale c0 must be > 0");
}

double CostFunction::cost(double x) const { return scale * std::pow(x, exponent) / exponent; }

double CostFunction::marginal(double x) const { return scale * std::pow(x, exponent - 1.0); }

std::vector<double> compute_B(const QuantileDensity& m, int n, const QuadratureSpec& q) {
  require_tournament_size(n);
  const auto dim = static_cast<std::size_t>(n - 1);
  std::vector<double> kern(dim);
  const VectorIntegrand f = [&](double z, std::span<double> out) {
    beta_kernels(n, z, kern);
    const double mz = m(z);
    for (std::size_t r = 0; r < dim; ++r) out[r] = kern[r] * mz;
  };
  return integrate_unit(dim, f, q);
}

double marginal_benefit(const PrizeDifferentials& d, const QuantileDensity& m,
                        const QuadratureSpec& q) {
  const auto dv = d.values();
  return integrate_unit([&](double z) { return eval_a_unchecked(z, dv) * m(z); }, q);
}

double effort_from_benefit(double benefit, const CostFunction& c) {
  if (!(benefit >= 0.0)) throw std::invalid_argument("marginal benefit must be non-negative");
  if (benefit == 0.0) return 0.0;
  return std::pow(benefit / c.scale, 1.0 / (c.exponent - 1.0));
}

double equilibrium_effort(const PrizeDifferentials& d, const QuantileDensity& m,
                          const CostFunction& c, const QuadratureSpec& q) {
  return effort_from_benefit(marginal_benefit(d, m, q), c);
}

std::vector<double> rank_probability_slopes(std::span<const double> B) {
  std::vector<double> beta(B.size() + 1);
  double prev = 0.0;
  for (std::size_t r = 0; r < B.size(); ++r) {
    beta[r] = B[r] - prev;
    prev = B[r];
  }
  beta.back() = -prev;
  return beta;
}

double bump_reference_length(const NoiseDistribution& dist) {
  if (dist.bounded) return dist.support_length;
  return dist.quantile(0.99) - dist.quantile(0.01);
}

namespace {

struct BatchSums {
  std::vector<double> sum;
  std::vector<double> sum_sq;
  std::int64_t count = 0;
};

BatchSums run_batch(const NoiseDistribution& dist, int n, std::int64_t count, double bump,
                    bool extrapolate, std::uint64_t seed, int batch) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(batch)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto m = static_cast<std::size_t>(n - 1);
  BatchSums out{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0), count};
  const double inv = 1.0 / (2.0 * bump);
  std::vector<double> opp(m);
  for (std::int64_t s = 0; s < count; ++s) {
    const double own = dist.quantile(unif(rng));
    for (auto& e : opp) e = dist.quantile(unif(rng));
    // Opponents strictly ahead of the deviator at effort +bump / -bump.
    std::size_t ahead_plus = 0;
    std::size_t ahead_minus = 0;
    for (double e : opp) {
      ahead_plus += e > own + bump;
      ahead_minus += e > own - bump;
    }
    // rank <= r  iff  ahead <= r - 1; the difference is 1 exactly for
    // r - 1 in [ahead_plus, ahead_minus).
    if (!extrapolate) {
      for (std::size_t r = ahead_plus; r < ahead_minus && r < m; ++r) {
        out.sum[r] += inv;
        out.sum_sq[r] += inv * inv;
      }
      continue;
    }
    // 2 D(h/2) - D(h); the half-bump range sits inside the full one.
    std::size_t half_plus = 0;
    std::size_t half_minus = 0;
    for (double e : opp) {
      half_plus += e > own + 0.5 * bump;
      half_minus += e > own - 0.5 * bump;
    }
    for (std::size_t r = ahead_plus; r < ahead_minus && r < m; ++r) {
      const double x = (r >= half_plus && r < half_minus ? 4.0 * inv : 0.0) - inv;
      out.sum[r] += x;
      out.sum_sq[r] += x * x;
    }
  }
  return out;
}

}  // namespace

MonteCarloB monte_carlo_B(const NoiseDistribution& dist, int n, const MonteCarloOptions& opts) {
  require_tournament_size(n);
  if (opts.samples < 10'000) throw std::invalid_argument("monte_carlo_B needs >= 1e4 samples");
  if (opts.batches < 1) throw std::invalid_argument("monte_carlo_B needs >= 1 batch");
  const double ref = bump_reference_length(dist);
  const double bump = std::isnan(opts.bump) ? 1e-2 * ref : opts.bump;
  if (!(bump >= 1e-4 * ref && bump <= 1e-1 * ref)) {
    throw std::invalid_argument("bump must lie in [1e-4, 1e-1] x reference length (" +
                                std::to_string(ref) + ")");
  }

  std::vector<std::future<BatchSums>> jobs;
  const std::int64_t per = opts.samples / opts.batches;
  for (int b = 0; b < opts.batches; ++b) {
    const std::int64_t count = per + (b == 0 ? opts.samples % opts.batches : 0);
    jobs.push_back(std::async(std::launch::async, run_batch, std::cref(dist), n, count, bump,
                              opts.extrapolate, opts.seed, b));
  }
  const auto m = static_cast<std::size_t>(n - 1);
  std::vector<double> sum(m, 0.0);
  std::vector<double> sum_sq(m, 0.0);
  for (auto& job : jobs) {
    const BatchSums part = job.get();
    for (std::size_t r = 0; r < m; ++r) {
      sum[r] += part.sum[r];
      sum_sq[r] += part.sum_sq[r];
    }
  }
  MonteCarloB out;
  out.samples = opts.samples;
  out.estimate.resize(m);
  out.standard_error.resize(m);
  const auto N = static_cast<double>(opts.samples);
  for (std::size_t r = 0; r < m; ++r) {
    const double mean = sum[r] / N;
    const double var = (sum_sq[r] / N - mean * mean) * N / (N - 1.0);
    out.estimate[r] = mean;
    out.standard_error[r] = std::sqrt(std::max(var, 0.0) / N);
  }
  return out;
}

}  // namespace rtourn
