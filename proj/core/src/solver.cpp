#include "rtourn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "rtourn/kernel.hpp"

namespace rtourn {

namespace {

// Newton iterations per pass: a base allowance plus room to add or drop
// every rank once.
constexpr int kNewtonBaseIterations = 50;
// Newton stops on the active set at this fraction of kkt_tol.
constexpr double kInnerTolFactor = 0.1;
// Below this active-set residual full Newton steps are taken without
// a line search; objective changes are then at rounding level.
constexpr double kLocalRegime = 1e-5;
// Weight given to zero components when falling back to the first-order pass.
constexpr double kReseedWeight = 1e-8;

std::vector<double> to_d(std::span<const double> w) {
  std::vector<double> d(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) d[i] = w[i] / static_cast<double>(i + 1);
  return d;
}

std::vector<double> to_w(std::span<const double> d) {
  std::vector<double> w(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) w[i] = d[i] * static_cast<double>(i + 1);
  return w;
}

void normalize(std::vector<double>& w) {
  double s = 0.0;
  for (double x : w) s += x;
  for (double& x : w) x /= s;
}

void rescale_budget(std::vector<double>& d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) s += static_cast<double>(i + 1) * d[i];
  for (double& x : d) x /= s;
}

std::vector<double> start_weights(int n, StartPoint start) {
  const std::size_t m = static_cast<std::size_t>(n - 1);
  std::vector<double> w(m);
  for (std::size_t i = 0; i < m; ++i) {
    w[i] = start == StartPoint::asymptotic ? 1.0 : static_cast<double>(i + 1);
  }
  normalize(w);
  return w;
}

std::vector<bool> active_set(std::span<const double> w, double threshold) {
  std::vector<bool> a(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) a[i] = w[i] > threshold;
  return a;
}

struct FirstOrderPass {
  std::vector<double> w;
  int iterations = 0;
};

// Exponentiated-gradient ascent on w_r = r d_r over the simplex. The partial
// derivative of W with respect to w_r is l_r / r, so the multiplicative
// update keeps every component strictly positive.
FirstOrderPass exponentiated_gradient(std::vector<double> w, const SolverConfig& cfg, int budget) {
  const StepRule& rule = cfg.step_rule;
  const std::size_t m = w.size();
  KernelDerivatives cur = kernel_derivatives(to_d(w), cfg.quadrature);
  std::vector<bool> prev = active_set(w, cfg.zero_threshold);
  int stable = 0;
  int it = 0;
  const int cap = std::min(budget, rule.max_iterations);
  std::vector<double> g(m);
  std::vector<double> trial(m);
  while (it < cap) {
    double gmax = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      g[i] = cur.gradient[i] / static_cast<double>(i + 1) - 1.0;
      gmax = std::max(gmax, std::abs(g[i]));
    }
    if (gmax <= cfg.kkt_tol) break;
    double eta = std::clamp(rule.scale / gmax, rule.eta_min, rule.eta_max);
    KernelDerivatives next;
    for (;;) {
      for (std::size_t i = 0; i < m; ++i) trial[i] = w[i] * std::exp(eta * g[i]);
      normalize(trial);
      next = kernel_derivatives(to_d(trial), cfg.quadrature);
      if (next.objective >= cur.objective || eta < 1e-12) break;
      eta *= 0.5;
    }
    w = trial;
    cur = std::move(next);
    ++it;
    std::vector<bool> act = active_set(w, cfg.zero_threshold);
    if (act == prev) {
      if (++stable >= rule.stable_window) break;
    } else {
      stable = 0;
      prev = std::move(act);
    }
  }
  return {std::move(w), it};
}

struct NewtonPass {
  std::vector<double> d;
  int iterations = 0;
  bool converged = false;
};

// Newton's method on the KKT equalities l_r(d) = mu r over the active set
// plus the budget row, with a primal active-set strategy: components that
// hit zero are dropped, inactive ranks with l_r / r > 1 are added.
NewtonPass active_set_newton(std::vector<double> d, std::vector<bool> active,
                             const SolverConfig& cfg) {
  const std::size_t m = d.size();
  active.front() = true;
  active.back() = true;
  for (std::size_t i = 0; i < m; ++i) {
    if (!active[i]) d[i] = 0.0;
  }
  rescale_budget(d);
  const double inner_tol = kInnerTolFactor * cfg.kkt_tol;
  double mu = 1.0;
  std::size_t last_added = m;

  NewtonPass out;
  const int max_it = kNewtonBaseIterations + 2 * static_cast<int>(m);
  for (int it = 0; it < max_it; ++it) {
    std::vector<int> ranks;
    for (std::size_t i = 0; i < m; ++i) {
      if (active[i]) ranks.push_back(static_cast<int>(i + 1));
    }
    const std::size_t k = ranks.size();
    const KernelDerivatives der = kernel_derivatives(d, cfg.quadrature, ranks);
    out.iterations = it + 1;

    double res = 0.0;
    for (int r : ranks) {
      res = std::max(res, std::abs(der.gradient[static_cast<std::size_t>(r - 1)] / r - 1.0));
    }
    if (res <= inner_tol) {
      std::size_t worst = m;
      double viol = 0.5 * cfg.kkt_tol;
      for (std::size_t i = 0; i < m; ++i) {
        if (active[i]) continue;
        const double v = der.gradient[i] / static_cast<double>(i + 1) - 1.0;
        if (v > viol) {
          viol = v;
          worst = i;
        }
      }
      if (worst == m) {
        out.d = std::move(d);
        out.converged = true;
        return out;
      }
      active[worst] = true;
      last_added = worst;
      continue;
    }

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k + 1),
                                                static_cast<Eigen::Index>(k + 1));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k + 1));
    for (std::size_t i = 0; i < k; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      for (std::size_t j = 0; j < k; ++j) {
        kkt(ii, static_cast<Eigen::Index>(j)) = der.hessian[i * k + j];
      }
      const double r = ranks[i];
      kkt(ii, static_cast<Eigen::Index>(k)) = -r;
      kkt(static_cast<Eigen::Index>(k), ii) = r;
      rhs(ii) = -(der.gradient[static_cast<std::size_t>(ranks[i] - 1)] - mu * r);
    }
    const Eigen::VectorXd step = kkt.fullPivLu().solve(rhs);
    if (!step.allFinite()) break;

    double slope = 0.0;
    for (std::size_t i = 0; i < k; ++i) slope += -rhs(static_cast<Eigen::Index>(i)) * step(static_cast<Eigen::Index>(i));
    if (!(slope > 0.0) && res > kLocalRegime) break;

    double alpha_max = 1.0;
    std::size_t blocking = m;
    for (std::size_t i = 0; i < k; ++i) {
      const auto idx = static_cast<std::size_t>(ranks[i] - 1);
      const double delta = step(static_cast<Eigen::Index>(i));
      if (delta < 0.0) {
        const double a = -d[idx] / delta;
        if (a < alpha_max) {
          alpha_max = a;
          blocking = idx;
        }
      }
    }
    // d_1 and d_{n-1} are positive at every optimum; never drop them.
    if (blocking == 0 || blocking == m - 1) {
      alpha_max *= 0.9;
      blocking = m;
    }
    if (blocking != m && blocking == last_added && alpha_max == 0.0) break;

    double alpha = alpha_max;
    std::vector<double> trial(m);
    bool accepted = false;
    while (alpha > 1e-10) {
      for (std::size_t i = 0; i < k; ++i) {
        const auto idx = static_cast<std::size_t>(ranks[i] - 1);
        trial[idx] = std::max(0.0, d[idx] + alpha * step(static_cast<Eigen::Index>(i)));
      }
      for (std::size_t i = 0; i < m; ++i) {
        if (!active[i]) trial[i] = 0.0;
      }
      if (blocking != m && alpha == alpha_max) trial[blocking] = 0.0;
      if (res < kLocalRegime) {
        accepted = true;
        break;
      }
      const double w_trial = kernel_derivatives(trial, cfg.quadrature).objective;
      if (w_trial >= der.objective + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    if (blocking != m && alpha == alpha_max) active[blocking] = false;
    mu += alpha * step(static_cast<Eigen::Index>(k));
    d = std::move(trial);
    rescale_budget(d);
    last_added = m;
  }
  out.d = std::move(d);
  out.converged = false;
  return out;
}

SolveReport trivial_report() {
  SolveReport rep;
  rep.n = 2;
  rep.d_star = {1.0};
  rep.v_star = {1.0, 0.0};
  rep.objective = 0.0;
  rep.kkt_residual = 0.0;
  rep.support = {true};
  rep.ratios = {1.0};
  rep.converged = true;
  return rep;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(kkt_tol > 0.0)) throw std::invalid_argument("kkt_tol must be > 0");
  if (!(zero_threshold > 0.0)) throw std::invalid_argument("zero_threshold must be > 0");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(step_rule.eta_min > 0.0) || step_rule.eta_max < step_rule.eta_min) {
    throw std::invalid_argument("step rule needs 0 < eta_min <= eta_max");
  }
  if (step_rule.stable_window < 1) throw std::invalid_argument("stable_window must be >= 1");
  quadrature.validate();
}

KktCheck kkt_check(const PrizeDifferentials& d, const SolverConfig& cfg) {
  const auto dv = d.values();
  if (dv.front() == 0.0 || dv.back() == 0.0) {
    throw DivergentIntegral("l_1 or l_{n-1} diverges when d_1 = 0 or d_{n-1} = 0");
  }
  KktCheck out;
  if (d.n() == 2) {
    out.ratios = {1.0 / dv[0]};
    out.mu_hat = out.ratios[0];
    out.residual = std::abs(out.ratios[0] - 1.0);
    return out;
  }
  const std::vector<double> l = gradient_l(d, cfg.quadrature);
  out.ratios.resize(l.size());
  out.mu_hat = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < l.size(); ++i) {
    const double ratio = l[i] / static_cast<double>(i + 1);
    out.ratios[i] = ratio;
    if (dv[i] > cfg.zero_threshold) {
      out.mu_hat = std::max(out.mu_hat, ratio);
      out.residual = std::max(out.residual, std::abs(ratio - 1.0));
    } else {
      out.residual = std::max(out.residual, std::max(0.0, ratio - 1.0));
    }
  }
  return out;
}

SolveReport solve_robust(int n, const SolverConfig& cfg) {
  require_tournament_size(n);
  cfg.validate();
  if (n == 2) return trivial_report();

  SolveReport rep;
  rep.n = n;
  std::vector<double> w = start_weights(n, cfg.start);
  std::vector<double> d;
  int used = 0;
  bool newton_ok = false;
  while (used < cfg.max_iterations) {
    FirstOrderPass fo = exponentiated_gradient(w, cfg, cfg.max_iterations - used);
    used += fo.iterations;
    rep.first_order_iterations += fo.iterations;
    NewtonPass nw = active_set_newton(to_d(fo.w), active_set(fo.w, cfg.zero_threshold), cfg);
    used += nw.iterations;
    rep.newton_iterations += nw.iterations;
    d = std::move(nw.d);
    if (nw.converged) {
      newton_ok = true;
      break;
    }
    // Fall back to the first-order pass from where Newton stopped.
    w = to_w(d);
    for (double& x : w) x = std::max(x, kReseedWeight);
    normalize(w);
    d = to_d(w);
    if (fo.iterations == 0 && nw.iterations == 0) break;
  }
  rep.iterations = used;

  const PrizeDifferentials dd = PrizeDifferentials::relaxed(d);
  const KktCheck kkt = kkt_check(dd, cfg);
  rep.d_star = d;
  const PrizeSchedule v = dd.schedule();
  rep.v_star.assign(v.values().begin(), v.values().end());
  rep.objective = objective_W(dd, cfg.quadrature);
  rep.kkt_residual = kkt.residual;
  rep.mu = 1.0;
  rep.mu_hat = kkt.mu_hat;
  rep.ratios = kkt.ratios;
  rep.support.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) rep.support[i] = d[i] > cfg.zero_threshold;
  rep.converged = newton_ok && kkt.residual <= cfg.kkt_tol && rep.support.front() &&
                  rep.support.back();
  return rep;
}

double n3_condition(double d1) {
  return std::log(2.0 * d1 / (1.0 - d1)) - 1.5 * (3.0 * d1 - 1.0);
}

PrizeDifferentials solve_n3_closed_form() {
  // d1 = 1/3 is a tangential root (the symmetric d1 = d2 point) and is
  // excluded by the bracket.
  const double lo = 1.0 / 3.0 + 1e-6;
  const double hi = 1.0 - 1e-9;
  if (!(n3_condition(lo) < 0.0 && n3_condition(hi) > 0.0)) {
    throw std::logic_error("n = 3 condition has no sign change on its bracket");
  }
  boost::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      n3_condition, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  const double d1 = 0.5 * (a + b);
  return PrizeDifferentials::relaxed({d1, 0.5 * (1.0 - d1)});
}

double n4_condition(double kappa) {
  return (kappa + 3.0) / (kappa + 1.0) *
             ((kappa - 1.0) / std::sqrt(kappa) * (0.5 * std::numbers::pi) - std::log(kappa)) -
         2.0;
}

N4ClosedForm solve_n4_closed_form(const QuadratureSpec& q) {
  const double lo = 1.0 + 1e-6;
  const double hi = 100.0;
  if (!(n4_condition(lo) < 0.0 && n4_condition(hi) > 0.0)) {
    throw std::logic_error("n = 4 condition has no sign change on its bracket");
  }
  boost::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      n4_condition, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  const double kappa = 0.5 * (a + b);
  const double d3 = 1.0 / (kappa + 3.0);
  N4ClosedForm out{PrizeDifferentials::relaxed({kappa * d3, 0.0, d3}), kappa, 0.0};
  out.slack_l2 = gradient_l(out.d, q)[1];
  return out;
}

PrizeDifferentials asymptotic_d(int n) {
  require_tournament_size(n);
  std::vector<double> d(static_cast<std::size_t>(n - 1));
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = 1.0 / (static_cast<double>(n - 1) * static_cast<double>(i + 1));
  }
  return PrizeDifferentials::relaxed(std::move(d));
}

PrizeSchedule asymptotic_v(int n) {
  // Suffix sums of d_inf are exactly (H_{n-1} - H_{r-1}) / (n-1).
  return asymptotic_d(n).schedule();
}

double asymptotic_gap(int n, const SolverConfig& cfg) {
  if (n < 3) throw std::invalid_argument("asymptotic_gap needs n >= 3");
  const SolveReport rep = solve_robust(n, cfg);
  if (!rep.converged) {
    throw std::runtime_error("solver did not converge for n = " + std::to_string(n));
  }
  return rep.objective - objective_W(asymptotic_d(n), cfg.quadrature);
}

}  // namespace rtourn
