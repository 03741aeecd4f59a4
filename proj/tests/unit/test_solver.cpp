#include <cmath>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rtourn/kernel.hpp"
#include "rtourn/solver.hpp"

using namespace rtourn;

namespace {

const SolveReport& solved(int n) {
  static std::map<int, SolveReport> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, solve_robust(n)).first;
  return it->second;
}

}  // namespace

TEST(ClosedForm, ThreePlayerRootMatchesBisectionOracle) {
  const auto d = solve_n3_closed_form();
  const double d1 = oracle::n3_d1();
  EXPECT_NEAR(d.rank(1), d1, 1e-12);
  EXPECT_NEAR(d.rank(2), (1 - d1) / 2, 1e-12);
  EXPECT_NEAR(d.rank(1), 0.8109, 1e-4);
  EXPECT_NEAR(n3_condition(d.rank(1)), 0.0, 1e-12);
  const auto v = d.schedule();
  EXPECT_NEAR(v.rank(1), 0.9055, 5e-4);
  EXPECT_NEAR(v.rank(2), 0.0945, 5e-4);
}

TEST(ClosedForm, FourPlayerRootMatchesOracle) {
  const auto cf = solve_n4_closed_form();
  const auto d = oracle::n4_d();
  EXPECT_NEAR(cf.d.rank(1), d[0], 1e-9);
  EXPECT_NEAR(cf.d.rank(3), d[2], 1e-9);
  EXPECT_DOUBLE_EQ(cf.d.rank(2), 0.0);
  EXPECT_NEAR(cf.kappa, d[0] / d[2], 1e-7);
  EXPECT_NEAR(cf.kappa, 6.896, 1e-3);
  EXPECT_NEAR(cf.d.rank(1), 0.6968, 5e-4);
  EXPECT_NEAR(cf.d.rank(3), 0.1011, 5e-4);
  EXPECT_NEAR(cf.slack_l2, 1.919, 2e-3);
  EXPECT_NEAR(cf.slack_l2, oracle::ell(d)[1], 1e-9);
  EXPECT_LT(cf.slack_l2, 2.0);
  EXPECT_NEAR(n4_condition(cf.kappa), 0.0, 1e-12);
}

TEST(SolveRobust, TwoPlayersTrivial) {
  const auto rep = solve_robust(2);
  EXPECT_TRUE(rep.converged);
  ASSERT_EQ(rep.v_star.size(), 2u);
  EXPECT_DOUBLE_EQ(rep.v_star[0], 1.0);
  EXPECT_DOUBLE_EQ(rep.v_star[1], 0.0);
  EXPECT_DOUBLE_EQ(rep.objective, 0.0);
}

TEST(SolveRobust, RejectsTinyTournaments) {
  EXPECT_THROW(solve_robust(1), std::invalid_argument);
}

TEST(SolveRobust, AgreesWithClosedForms) {
  const auto d3 = solve_n3_closed_form();
  for (int r = 1; r <= 2; ++r) EXPECT_NEAR(solved(3).d_star[static_cast<std::size_t>(r - 1)], d3.rank(r), 1e-5);
  const auto d4 = solve_n4_closed_form().d;
  for (int r = 1; r <= 3; ++r) EXPECT_NEAR(solved(4).d_star[static_cast<std::size_t>(r - 1)], d4.rank(r), 1e-5);
  EXPECT_NEAR(solved(3).objective, -0.2328, 1e-3);
}

TEST(SolveRobust, FourPlayerObjectiveMatchesOracle) {
  EXPECT_NEAR(solved(4).objective, oracle::W(oracle::n4_d()), 1e-9);
  EXPECT_NEAR(solved(4).objective, -0.4623039, 1e-6);
}

TEST(SolveRobust, ReferenceTableRows) {
  // The n = 9 row is checked separately below.
  for (int n : {3, 4, 5, 6, 7, 8, 10}) {
    const auto& ref = oracle::reference_table()[static_cast<std::size_t>(n - 3)];
    const auto& rep = solved(n);
    ASSERT_TRUE(rep.converged) << n;
    for (std::size_t r = 0; r < ref.size(); ++r) {
      EXPECT_NEAR(rep.v_star[r], ref[r], 5e-4) << "n " << n << " v" << r + 1;
    }
  }
}

TEST(SolveRobust, NinePlayerScheduleBeatsReferenceRow) {
  // The rounded reference row for n = 9 is not optimal; our optimum has a
  // higher objective. Frozen regression values for the solved row.
  const auto& rep = solved(9);
  ASSERT_TRUE(rep.converged);
  const std::vector<double> frozen{0.4683, 0.1274, 0.1274, 0.1274, 0.0546, 0.0510, 0.0303, 0.0137, 0.0};
  for (std::size_t r = 0; r < frozen.size(); ++r) EXPECT_NEAR(rep.v_star[r], frozen[r], 6e-5);
  const auto ref = PrizeSchedule::relaxed(oracle::reference_table()[6]).differentials();
  std::vector<double> scaled(ref.values().begin(), ref.values().end());
  const double b = ref.budget();
  for (double& x : scaled) x /= b;
  EXPECT_GT(rep.objective, objective_W(PrizeDifferentials::feasible(scaled)));
}

class KktStructure : public ::testing::TestWithParam<int> {};

TEST_P(KktStructure, ActiveRatiosOneInactiveBelow) {
  const int n = GetParam();
  const auto& rep = solved(n);
  ASSERT_TRUE(rep.converged);
  EXPECT_LE(rep.kkt_residual, 1e-8);
  EXPECT_DOUBLE_EQ(rep.mu, 1.0);
  EXPECT_NEAR(rep.mu_hat, 1.0, 1e-8);
  const SolverConfig cfg;
  const auto l = oracle::ell(rep.d_star);
  for (int r = 1; r <= n - 1; ++r) {
    const auto i = static_cast<std::size_t>(r - 1);
    EXPECT_NEAR(rep.ratios[i], l[i] / r, 1e-8);
    if (rep.d_star[i] > cfg.zero_threshold) {
      EXPECT_NEAR(rep.ratios[i], 1.0, 1e-8) << "n " << n << " r " << r;
    } else {
      EXPECT_LT(rep.ratios[i], 1.0) << "n " << n << " r " << r;
    }
  }
  double budget = 0.0;
  for (int r = 1; r <= n - 1; ++r) budget += r * rep.d_star[static_cast<std::size_t>(r - 1)];
  EXPECT_NEAR(budget, 1.0, 1e-12);
  EXPECT_TRUE(rep.support.front());
  EXPECT_TRUE(rep.support.back());
}

INSTANTIATE_TEST_SUITE_P(Sizes, KktStructure, ::testing::Values(3, 4, 5, 6, 7, 8, 9, 10, 15, 20));

TEST(SolveRobust, FlatRegions) {
  const SolverConfig cfg;
  EXPECT_LE(solved(4).d_star[1], cfg.zero_threshold);
  // n = 7: v2 = v3 = v4, i.e. d2 = d3 = 0.
  EXPECT_LE(solved(7).d_star[1], cfg.zero_threshold);
  EXPECT_LE(solved(7).d_star[2], cfg.zero_threshold);
  EXPECT_GT(solved(7).d_star[3], cfg.zero_threshold);
}

TEST(SolveRobust, StartPointDoesNotMatter) {
  SolverConfig alt;
  alt.start = StartPoint::equal_differentials;
  for (int n : {5, 8}) {
    const auto rep = solve_robust(n, alt);
    ASSERT_TRUE(rep.converged);
    for (std::size_t i = 0; i < rep.d_star.size(); ++i) EXPECT_NEAR(rep.d_star[i], solved(n).d_star[i], 1e-7);
  }
}

TEST(SolveRobust, Deterministic) {
  const auto a = solve_robust(6);
  const auto b = solve_robust(6);
  EXPECT_EQ(a.d_star, b.d_star);
  EXPECT_EQ(a.objective, b.objective);
}

TEST(SolveRobust, ConfigValidation) {
  SolverConfig cfg;
  cfg.kkt_tol = 0.0;
  EXPECT_THROW(solve_robust(3, cfg), std::invalid_argument);
  cfg = {};
  cfg.quadrature.order = 0;
  EXPECT_THROW(solve_robust(3, cfg), std::invalid_argument);
}

TEST(KktCheck, EqualDifferentialsThreePlayers) {
  // l = (1.5, 1.5): ratios 1.5 and 0.75, residual 0.5.
  const auto k = kkt_check(PrizeDifferentials::feasible({1.0 / 3, 1.0 / 3}));
  EXPECT_NEAR(k.ratios[0], 1.5, 1e-12);
  EXPECT_NEAR(k.ratios[1], 0.75, 1e-12);
  EXPECT_NEAR(k.residual, 0.5, 1e-12);
}

TEST(KktCheck, ZeroEndpointThrows) {
  EXPECT_THROW(kkt_check(PrizeDifferentials::feasible({1.0, 0.0})), DivergentIntegral);
}

TEST(Asymptotic, HarmonicSchedule) {
  const auto v = asymptotic_v(4);
  EXPECT_NEAR(v.rank(1), 11.0 / 18, 1e-15);
  EXPECT_NEAR(v.rank(2), 5.0 / 18, 1e-15);
  EXPECT_NEAR(v.rank(3), 2.0 / 18, 1e-15);
  EXPECT_DOUBLE_EQ(v.rank(4), 0.0);
  for (int n : {2, 3, 50, 1000}) {
    const auto d = asymptotic_d(n);
    EXPECT_NEAR(d.budget(), 1.0, 1e-12);
    EXPECT_NEAR(d.rank(1), 1.0 / (n - 1), 1e-15);
  }
}

TEST(Asymptotic, GapPositiveDecreasingFrozen) {
  // Frozen from a run at order 64, refine_tol 1e-13, kkt_tol 1e-11.
  const std::vector<std::pair<int, double>> frozen{
      {10, 0.041289272435}, {25, 0.017506332878}, {50, 0.008913210765}, {100, 0.004492511155}};
  double prev = 1e300;
  for (const auto& [n, expected] : frozen) {
    const double gap = asymptotic_gap(n);
    EXPECT_GT(gap, 0.0) << n;
    EXPECT_LT(gap, prev) << n;
    EXPECT_NEAR(gap, expected, 1e-8) << n;
    prev = gap;
  }
  EXPECT_LE(prev, 0.02);
}

TEST(Asymptotic, LargeNScheduleNearHarmonic) {
  // Outside the top 5% of ranks the solved schedule stays within
  // 0.1 * v_inf_1 of the harmonic one.
  const int n = 100;
  const auto& rep = solved(n);
  ASSERT_TRUE(rep.converged);
  const auto vinf = asymptotic_v(n);
  double worst = 0.0;
  for (int r = 1; r <= n; ++r) {
    if (r <= n / 20) continue;
    worst = std::max(worst, std::abs(rep.v_star[static_cast<std::size_t>(r - 1)] - vinf.rank(r)));
  }
  EXPECT_LE(worst, 0.1 * vinf.rank(1));
}

TEST(StructureTheorem, EndpointsPositiveUpTo30) {
  for (int n = 3; n <= 30; ++n) {
    const auto& rep = solved(n);
    ASSERT_TRUE(rep.converged) << n;
    EXPECT_GT(rep.d_star.front(), 0.0) << n;
    EXPECT_GT(rep.d_star.back(), 0.0) << n;
  }
}
