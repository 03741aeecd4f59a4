// Robust prize design: maximise W(d) = int log a(z; d) dz subject to
// d >= 0 and sum_r r d_r = 1.
//
// The program is strictly concave, so the KKT conditions
//   l_r(d) <= r * mu,  with equality where d_r > 0,
// are necessary and sufficient, and the multiplier is always mu = 1
// (sum_r d_r l_r = int a / a = 1 on the budget plane).
#pragma once

#include <string>
#include <vector>

#include "rtourn/quadrature.hpp"
#include "rtourn/types.hpp"

namespace rtourn {

/// Safeguarded step rule for the exponentiated-gradient phase.
struct StepRule {
  double scale = 0.5;        // eta = scale / max_r |l_r / r - 1|
  double eta_min = 1e-3;
  double eta_max = 1.0;
  int stable_window = 25;    // iterations with an unchanged active set
  int max_iterations = 2000; // cap on a single first-order pass
};

enum class StartPoint {
  asymptotic,           // d_r = 1 / ((n-1) r)
  equal_differentials,  // d_r constant
};

struct SolverConfig {
  double kkt_tol = 1e-8;
  double zero_threshold = 1e-9;
  int max_iterations = 10000;
  StepRule step_rule;
  QuadratureSpec quadrature;
  StartPoint start = StartPoint::asymptotic;

  void validate() const;
};

struct SolveReport {
  int n = 0;
  std::vector<double> d_star;
  std::vector<double> v_star;
  double objective = 0.0;
  double kkt_residual = 0.0;
  double mu = 1.0;      // reported multiplier (always 1)
  double mu_hat = 1.0;  // max_{active r} l_r / r, diagnostic
  std::vector<bool> support;
  /// l_r / r at the solution.
  std::vector<double> ratios;
  int iterations = 0;
  int first_order_iterations = 0;
  int newton_iterations = 0;
  bool converged = false;

  PrizeDifferentials differentials() const { return PrizeDifferentials::relaxed(d_star); }
  PrizeSchedule schedule() const { return PrizeSchedule::relaxed(v_star); }
};

SolveReport solve_robust(int n, const SolverConfig& cfg = {});

struct KktCheck {
  double residual = 0.0;
  double mu_hat = 1.0;
  std::vector<double> ratios;  // l_r / r
};

/// KKT residual with mu fixed at 1:
///   max( max_{active} |l_r/r - 1|, max_{inactive} max(0, l_r/r - 1) ).
/// Throws DivergentIntegral if d_1 = 0 or d_{n-1} = 0.
KktCheck kkt_check(const PrizeDifferentials& d, const SolverConfig& cfg = {});

/// log(2 d1 / (1 - d1)) - 3 (3 d1 - 1) / 2; the n = 3 optimality condition
/// after eliminating d2 with the budget.
double n3_condition(double d1);

/// Non-trivial root of n3_condition in (1/3, 1) and d2 = (1 - d1) / 2.
PrizeDifferentials solve_n3_closed_form();

/// (k + 3)/(k + 1) * ((k - 1)/sqrt(k) * pi/2 - log k) - 2 for the n = 4
/// ratio k = d1 / d3 with d2 = 0.
double n4_condition(double kappa);

struct N4ClosedForm {
  PrizeDifferentials d;
  double kappa = 0.0;
  /// l_2 at the solution; optimality of d2 = 0 requires slack_l2 < 2.
  double slack_l2 = 0.0;
};

N4ClosedForm solve_n4_closed_form(const QuadratureSpec& q = {});

/// d_r = 1 / ((n-1) r)
PrizeDifferentials asymptotic_d(int n);

/// v_r = (H_{n-1} - H_{r-1}) / (n-1)
PrizeSchedule asymptotic_v(int n);

/// W(d*) - W(d_inf) with a common quadrature spec. Throws std::runtime_error
/// if the solve does not converge.
double asymptotic_gap(int n, const SolverConfig& cfg = {});

}  // namespace rtourn
