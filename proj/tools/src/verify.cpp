#include "rtourn_cli/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rtourn/adversary.hpp"
#include "rtourn/equilibrium.hpp"
#include "rtourn/kernel.hpp"

namespace rtourn::cli {

namespace {

constexpr double kEntropyTol = 1e-8;
constexpr double kValueTol = 1e-8;
constexpr double kPerturbationTol = 1e-10;
constexpr double kSigmaBand = 3.0;
// Two-sided tail mass outside +-3 sigma.
constexpr double kFamilyTail = 0.0026997960632601866;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

CheckResult make(std::string name, double residual, double tol, bool passed) {
  return {std::move(name), residual, tol, passed};
}

// z such that `ranks` independent two-sided tests at +-z together keep the
// tail mass of a single 3-sigma test (Bonferroni).
double family_sigma_band(std::size_t ranks) {
  if (ranks <= 1) return kSigmaBand;
  const double target = kFamilyTail / static_cast<double>(ranks);
  double lo = kSigmaBand;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::erfc(mid / std::sqrt(2.0)) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

bool VerifySummary::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::vector<std::string> VerifySummary::failed() const {
  std::vector<std::string> names;
  for (const auto& c : checks) {
    if (!c.passed) names.push_back(c.name);
  }
  return names;
}

VerifySummary run_verification(const PrizeDifferentials& d, const VerifyOptions& opts) {
  const QuadratureSpec& q = opts.solver.quadrature;
  const EntropyBound h(opts.hbar);
  VerifySummary out;
  out.n = d.n();

  const double budget_err = std::abs(d.budget() - 1.0);
  out.checks.push_back(make("budget", budget_err, kBudgetTolerance, budget_err <= kBudgetTolerance));

  const auto dv = d.values();
  const bool endpoints = dv.front() > 0.0 && dv.back() > 0.0;
  if (endpoints) {
    out.kkt_residual = kkt_check(d, opts.solver).residual;
  } else {
    out.kkt_residual = std::numeric_limits<double>::infinity();
  }
  out.checks.push_back(make("kkt", out.kkt_residual, opts.solver.kkt_tol,
                            out.kkt_residual <= opts.solver.kkt_tol));
  out.checks.push_back(make("endpoint_support", std::min(dv.front(), dv.back()), 0.0, endpoints));

  static const char* const kDependent[] = {"entropy_binding", "minimized_value",
                                           "minimax_perturbations", "bounded_support",
                                           "b_oracle"};
  if (!endpoints) {
    // m* is undefined without positive endpoint differentials.
    for (const char* name : kDependent) out.checks.push_back(make(name, kNaN, kNaN, false));
    return out;
  }

  const QuantileDensity m = adversarial_m(d, h, q);
  const double entropy_err = std::abs(entropy_of(m, q) - opts.hbar);
  out.checks.push_back(make("entropy_binding", entropy_err, kEntropyTol, entropy_err <= kEntropyTol));

  const double claimed = std::exp(-opts.hbar + objective_W(d, q));
  const double value_err = std::abs(marginal_benefit(d, m, q) - claimed) / claimed;
  out.checks.push_back(make("minimized_value", value_err, kValueTol, value_err <= kValueTol));

  const PerturbationCheck pc = check_minimax_perturbations(d, h, opts.perturbations, opts.seed, q);
  out.checks.push_back(make("minimax_perturbations", pc.worst_gap, kPerturbationTol,
                            pc.worst_gap >= -kPerturbationTol));

  const NoiseDistribution dist = reconstruct_distribution(m, 0.0, opts.grid, q);
  out.checks.push_back(make("bounded_support", dist.support_length, kNaN,
                            dist.bounded && std::isfinite(dist.support_length)));

  const std::vector<double> exact = compute_B(m, d.n(), q);
  MonteCarloOptions mc;
  mc.samples = opts.mc_samples;
  mc.seed = opts.seed;
  mc.bump = opts.bump_fraction * bump_reference_length(dist);
  mc.extrapolate = true;
  const MonteCarloB est = monte_carlo_B(dist, d.n(), mc);
  double worst_z = 0.0;
  for (std::size_t r = 0; r < exact.size(); ++r) {
    const double se = est.standard_error[r];
    const double diff = std::abs(est.estimate[r] - exact[r]);
    worst_z = std::max(worst_z, se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity()));
  }
  const double band = family_sigma_band(exact.size());
  out.checks.push_back(make("b_oracle", worst_z, band, worst_z <= band));
  return out;
}

}  // namespace rtourn::cli
