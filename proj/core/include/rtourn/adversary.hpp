// Entropy-constrained adversarial noise.
//
// Noise enters equilibrium effort only through the inverse quantile density
// m(z) = f(F^-1(z)). For a prize vector d the entropy-bounded adversary picks
//
//   m*(z; d) = exp(-H + W(d)) / a(z; d),
//
// and the CDF is recovered from m by t - eps = int_0^F dz / m(z).
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "rtourn/quadrature.hpp"
#include "rtourn/types.hpp"

namespace rtourn {

/// Upper bound on the Shannon entropy of the noise density, in nats.
class EntropyBound {
 public:
  explicit EntropyBound(double nats);
  double nats() const noexcept { return value_; }

 private:
  double value_;
};

enum class DensitySource { adversarial, uniform, exponential_limit, user_grid };

const char* to_string(DensitySource s);

/// m(z) on (0, 1) with a tag recording where it came from.
class QuantileDensity {
 public:
  QuantileDensity(DensitySource source, std::function<double(double)> fn,
                  double scale = std::numeric_limits<double>::quiet_NaN());

  double operator()(double z) const { return fn_(z); }
  DensitySource source() const noexcept { return source_; }
  /// Multiplicative constant lambda of an adversarial density (NaN otherwise).
  double scale() const noexcept { return scale_; }

  /// m = 1: uniform noise on a unit interval.
  static QuantileDensity uniform();
  /// m(z) = rate * (1 - z): exponential noise.
  static QuantileDensity exponential(double rate);
  /// Piecewise-linear interpolation of (u, m) samples; u must start at 0,
  /// end at 1 and increase strictly; m must be positive.
  static QuantileDensity from_grid(std::vector<double> u, std::vector<double> m);

 private:
  DensitySource source_;
  std::function<double(double)> fn_;
  double scale_;
};

/// m*(.; d) with lambda = exp(-H + W(d)) computed once. Requires d_1 > 0 and
/// d_{n-1} > 0.
QuantileDensity adversarial_m(const PrizeDifferentials& d, EntropyBound h,
                              const QuadratureSpec& q = {});

/// -int_0^1 log m(z) dz. Endpoint panels are graded so log singularities
/// at z = 0 or 1 integrate cleanly.
double entropy_of(const QuantileDensity& m, const QuadratureSpec& q = {});

/// Entropy-preserving perturbations m~ = m* exp(g - int g) with random
/// smooth g (a short random Fourier series). Returns the smallest value of
/// int a m~ - int a m* over `trials` draws; the adversary's optimality means
/// this is never negative.
struct PerturbationCheck {
  double worst_gap = 0.0;
  double baseline = 0.0;  // int a m*
  int trials = 0;
};

PerturbationCheck check_minimax_perturbations(const PrizeDifferentials& d, EntropyBound h,
                                              int trials, std::uint64_t seed,
                                              const QuadratureSpec& q = {});

/// Tabulated noise distribution (t, F, f, hazard).
struct NoiseDistribution {
  std::vector<double> t;
  std::vector<double> cdf;
  std::vector<double> pdf;
  std::vector<double> hazard;  // +inf where F = 1
  double support_lower = 0.0;
  double support_length = std::numeric_limits<double>::infinity();
  bool bounded = false;

  std::size_t size() const noexcept { return t.size(); }

  /// F^-1(u) by cubic Hermite interpolation (dt/du = 1/f at the nodes);
  /// linear extrapolation with slope 1/f beyond the last node.
  double quantile(double u) const;
  /// F(t) by inverting the Hermite segment containing t.
  double cdf_at(double x) const;
  /// f(t) by linear interpolation in t.
  double pdf_at(double x) const;
};

inline constexpr int kDefaultGridSize = 2001;

/// Builds (t, F, f, hazard) from m via t(u) = eps + int_0^u dz / m(z).
///
/// The u-grid is uniform with `grid_size` points plus geometric refinement in
/// the top 1%. If int_0^1 dz / m(z) fails to converge, the support is flagged
/// unbounded and the grid stops at u = 1 - 1e-6.
NoiseDistribution reconstruct_distribution(const QuantileDensity& m, double eps_lower = 0.0,
                                           int grid_size = kDefaultGridSize,
                                           const QuadratureSpec& q = {});

/// Rate of the large-n limit of m*(.; d_inf): m*(z) -> rate * (1 - z) with
/// rate = exp(1 - H). This is the exponential law whose entropy 1 - log(rate)
/// equals H.
double exponential_limit_rate(EntropyBound h);

/// Exponential noise with rate exponential_limit_rate(h) anchored at eps,
/// tabulated up to F = 1 - 1e-9.
NoiseDistribution exponential_limit(EntropyBound h, double eps_lower = 0.0,
                                    int grid_size = kDefaultGridSize);

/// Coefficients of the n = 3 square-root form
///   F(t) = -b + sqrt(b^2 + k (t - eps))
/// derived from the closed-form optimum (carried at full precision).
struct N3SquareRootForm {
  double b = 0.0;
  double k = 0.0;
  double support_length = 0.0;
};

N3SquareRootForm n3_square_root_form(EntropyBound h);

/// Closed-form n = 3 adversarial distribution on a t-uniform grid.
NoiseDistribution closed_form_n3_distribution(EntropyBound h, double eps_lower = 0.0,
                                              int grid_size = kDefaultGridSize);

/// Closed-form n = 4 CDF and density in the normalisation
/// exp(H - W(d*)) = 1, eps = 0 (support [0, 0.798]). Throws std::domain_error
/// outside the support.
double n4_closed_form_cdf(double t);
double n4_closed_form_pdf(double t);
inline constexpr double kN4NormalisedSupport = 0.798;

/// n = 4 closed form for general H by rescaling t; the normalised support
/// length 0.798 is scaled by exp(H - w_star), where w_star = W(d*).
NoiseDistribution closed_form_n4_distribution(EntropyBound h, double w_star,
                                              double eps_lower = 0.0,
                                              int grid_size = kDefaultGridSize);

}  // namespace rtourn
