#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rtourn/kernel.hpp"
#include "rtourn/types.hpp"

using namespace rtourn;

TEST(BinomialPmf, MatchesExactCoefficients) {
  std::vector<double> pmf(40);
  for (int trials : {0, 1, 2, 7, 19, 30}) {
    for (double p : {0.0, 0.013, 0.25, 0.5, 0.77, 0.999, 1.0}) {
      binomial_pmf(trials, p, pmf);
      double total = 0.0;
      for (int k = 0; k <= trials; ++k) {
        const long double exact = oracle::choose(trials, k) * std::pow(static_cast<long double>(p), k) *
                                  std::pow(1.0L - p, trials - k);
        EXPECT_NEAR(pmf[static_cast<std::size_t>(k)], static_cast<double>(exact), 1e-14)
            << "trials " << trials << " p " << p << " k " << k;
        total += pmf[static_cast<std::size_t>(k)];
      }
      EXPECT_NEAR(total, 1.0, 1e-14);
    }
  }
}

TEST(BinomialPmf, RejectsShortOutput) {
  std::vector<double> pmf(3);
  EXPECT_THROW(binomial_pmf(5, 0.5, pmf), std::invalid_argument);
}

TEST(BetaKernels, MatchNaiveAndIntegrateToOne) {
  for (int n : {2, 3, 4, 9, 25}) {
    std::vector<double> k(static_cast<std::size_t>(n - 1));
    for (double z : {0.0, 0.1, 0.5, 0.93, 1.0}) {
      beta_kernels(n, z, k);
      for (int r = 1; r <= n - 1; ++r) {
        EXPECT_NEAR(k[static_cast<std::size_t>(r - 1)], oracle::kernel(n, r, z), 1e-12 * n);
      }
    }
    for (int r = 1; r <= n - 1; ++r) {
      EXPECT_NEAR(oracle::integrate([&](double z) {
                    beta_kernels(n, z, k);
                    return k[static_cast<std::size_t>(r - 1)];
                  }),
                  1.0, 1e-12);
    }
  }
}

TEST(EvalA, MatchesNaivePolynomial) {
  std::mt19937_64 rng(7);
  for (int n : {2, 3, 4, 6, 11, 20, 30}) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto dv = oracle::random_feasible(n, rng, 0.0);
      const auto d = PrizeDifferentials::feasible(dv);
      for (double z = 0.0; z <= 1.0; z += 0.0625) {
        EXPECT_NEAR(eval_a(z, d), oracle::a_naive(z, dv), 1e-13) << "n " << n << " z " << z;
      }
    }
  }
}

TEST(EvalA, EndpointIdentities) {
  std::mt19937_64 rng(11);
  for (int n : {3, 5, 12, 40}) {
    const auto d = PrizeDifferentials::feasible(oracle::random_feasible(n, rng));
    EXPECT_DOUBLE_EQ(eval_a(0.0, d), (n - 1) * d.rank(n - 1));
    EXPECT_DOUBLE_EQ(eval_a(1.0, d), (n - 1) * d.rank(1));
  }
}

TEST(EvalA, IntegralIsSumOfDifferentials) {
  // int K_r = 1, so int a = sum_r d_r.
  std::mt19937_64 rng(5);
  const auto dv = oracle::random_feasible(8, rng);
  const auto d = PrizeDifferentials::feasible(dv);
  double sum = 0.0;
  for (double x : dv) sum += x;
  EXPECT_NEAR(oracle::integrate([&](double z) { return eval_a(z, d); }), sum, 1e-14);
}

TEST(EvalA, RejectsOutOfRangeZ) {
  const auto d = PrizeDifferentials::feasible({1.0});
  EXPECT_THROW(eval_a(-0.1, d), std::invalid_argument);
  EXPECT_THROW(eval_a(1.5, d), std::invalid_argument);
}

TEST(ObjectiveW, TwoPlayersIsLogD1) {
  EXPECT_DOUBLE_EQ(objective_W(PrizeDifferentials::feasible({1.0})), 0.0);
  EXPECT_NEAR(objective_W(PrizeDifferentials::relaxed({0.5})), std::log(0.5), 1e-15);
}

TEST(ObjectiveW, ThreePlayerClosedForm) {
  // a = alpha + beta z
  for (double d1 : {0.5, 0.7, 0.81091684442379108, 0.95}) {
    const double d2 = (1 - d1) / 2;
    const double alpha = 2 * d2;
    const double beta = 2 * (d1 - d2);
    const double exact =
        ((alpha + beta) * std::log(alpha + beta) - alpha * std::log(alpha)) / beta - 1.0;
    EXPECT_NEAR(objective_W(PrizeDifferentials::feasible({d1, d2})), exact, 1e-12);
  }
}

TEST(ObjectiveW, MatchesAdaptiveOracle) {
  std::mt19937_64 rng(3);
  for (int n : {4, 7, 15}) {
    const auto dv = oracle::random_feasible(n, rng);
    EXPECT_NEAR(objective_W(PrizeDifferentials::feasible(dv)), oracle::W(dv), 1e-11);
  }
}

TEST(ObjectiveW, ZeroEndpointNeedsSingularMode) {
  // d_{n-1} = 0 gives a log z singularity at z = 0: integrable, but only the
  // graded endpoint panels resolve it.
  const std::vector<double> dv{0.6, 0.2, 0.0};
  const double exact = oracle::W(dv);
  EXPECT_NEAR(objective_W(PrizeDifferentials::feasible(dv), QuadratureSpec{}, EndpointMode::singular),
              exact, 1e-9);
}

TEST(EvalA, ThreePlayerLinearForm) {
  const auto d = PrizeDifferentials::relaxed({0.8109, 0.0945});
  EXPECT_NEAR(eval_a(0.0, d), 0.1890, 1e-12);
  EXPECT_NEAR(eval_a(1.0, d), 1.6218, 1e-12);
  EXPECT_DOUBLE_EQ(eval_a(0.7, PrizeDifferentials::feasible({1.0})), 1.0);
}

TEST(EvalA, HarmonicScheduleMatchesNaiveSum) {
  std::vector<double> dv;
  for (int r = 1; r <= 9; ++r) dv.push_back(1.0 / (9.0 * r));
  EXPECT_NEAR(eval_a(0.5, PrizeDifferentials::feasible(dv)), oracle::a_naive(0.5, dv), 1e-12);
}

TEST(ObjectiveW, FourPlayerAtRoundedOptimum) {
  // Direct integration at d = (0.6968, 0, 0.1011); the value is about -0.4622.
  const std::vector<double> dv{0.6968, 0.0, 0.1011};
  const double w = objective_W(PrizeDifferentials::relaxed(dv));
  EXPECT_NEAR(w, oracle::W(dv), 1e-10);
  EXPECT_NEAR(w, -0.4622, 1e-3);
}

TEST(GradientL, ThreePlayerAtRoundedRoot) {
  const auto l = gradient_l(PrizeDifferentials::relaxed({0.8109, 0.0945}));
  EXPECT_NEAR(l[0], 1.0, 2e-3);
  EXPECT_NEAR(l[1], 2.0, 2e-3);
  // l_1 = (d1 - d2 - d2 log(d1 / d2)) / (d1 - d2)^2
  const double d1 = 0.8109;
  const double d2 = 0.0945;
  EXPECT_NEAR(l[0], (d1 - d2 - d2 * std::log(d1 / d2)) / ((d1 - d2) * (d1 - d2)), 1e-12);
}

TEST(GradientL, TwoPlayers) {
  const auto l = gradient_l(PrizeDifferentials::feasible({1.0}));
  ASSERT_EQ(l.size(), 1u);
  EXPECT_NEAR(l[0], 1.0, 1e-14);
}

TEST(ObjectiveW, AllZeroThrows) {
  EXPECT_THROW(objective_W(PrizeDifferentials::relaxed({0.0, 0.0})), DivergentIntegral);
}

TEST(GradientL, ThreePlayerValuesAtEqualDifferentials) {
  const auto l = gradient_l(PrizeDifferentials::feasible({1.0 / 3, 1.0 / 3}));
  EXPECT_NEAR(l[0], 1.5, 1e-13);
  EXPECT_NEAR(l[1], 1.5, 1e-13);
}

TEST(GradientL, FourPlayerClosedForm) {
  // d2 = 0: explicit l1 and l3 in terms of d1, d3.
  for (double d3 : {0.05, 0.101, 0.2}) {
    const double d1 = 1 - 3 * d3;
    const double s = d1 + d3;
    const double root = std::sqrt(d1 * d3);
    const double half_pi = std::numbers::pi / 2;
    const double l1 = (1 + d3 / s * std::log(d1 / d3) - d3 * (d1 - d3) / (s * root) * half_pi) / s;
    const double l3 = (1 + d1 / s * std::log(d3 / d1) + d1 * (d1 - d3) / (s * root) * half_pi) / s;
    const auto l = gradient_l(PrizeDifferentials::feasible({d1, 0.0, d3}));
    EXPECT_NEAR(l[0], l1, 1e-11);
    EXPECT_NEAR(l[2], l3, 1e-11);
  }
}

TEST(GradientL, EulerIdentity) {
  // a is linear in d, so sum_r d_r l_r = int a / a = 1 for any d.
  std::mt19937_64 rng(17);
  for (int n : {3, 6, 13, 30}) {
    const auto dv = oracle::random_feasible(n, rng);
    const auto l = gradient_l(PrizeDifferentials::feasible(dv));
    double s = 0.0;
    for (std::size_t i = 0; i < dv.size(); ++i) s += dv[i] * l[i];
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

class FeasibleDirectionGradient : public ::testing::TestWithParam<int> {};

// Directional derivative of W along e_r / r - e_s / s (which keeps the
// budget) against a central difference.
TEST_P(FeasibleDirectionGradient, MatchesFiniteDifferences) {
  const int n = GetParam();
  std::mt19937_64 rng(100 + n);
  std::uniform_int_distribution<int> pick(1, n - 1);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    const auto dv = oracle::random_feasible(n, rng, 0.1);
    const auto l = gradient_l(PrizeDifferentials::feasible(dv));
    int r = pick(rng);
    int s = pick(rng);
    if (r == s) s = r % (n - 1) + 1;
    auto plus = dv;
    auto minus = dv;
    plus[static_cast<std::size_t>(r - 1)] += h / r;
    plus[static_cast<std::size_t>(s - 1)] -= h / s;
    minus[static_cast<std::size_t>(r - 1)] -= h / r;
    minus[static_cast<std::size_t>(s - 1)] += h / s;
    const double fd = (objective_W(PrizeDifferentials::feasible(plus)) -
                       objective_W(PrizeDifferentials::feasible(minus))) /
                      (2 * h);
    const double analytic = l[static_cast<std::size_t>(r - 1)] / r - l[static_cast<std::size_t>(s - 1)] / s;
    EXPECT_NEAR(fd, analytic, 1e-5 * std::max(1.0, std::abs(analytic))) << "n " << n << " r " << r << " s " << s;
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, FeasibleDirectionGradient, ::testing::Values(3, 5, 8));

TEST(ObjectiveW, ConcaveAlongSegments) {
  std::mt19937_64 rng(23);
  for (int n : {3, 6, 10}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto x = oracle::random_feasible(n, rng);
      const auto y = oracle::random_feasible(n, rng);
      const double wx = objective_W(PrizeDifferentials::feasible(x));
      const double wy = objective_W(PrizeDifferentials::feasible(y));
      for (double lam : {0.25, 0.5, 0.75}) {
        std::vector<double> mix(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) mix[i] = lam * x[i] + (1 - lam) * y[i];
        const double wm = objective_W(PrizeDifferentials::relaxed(mix));
        EXPECT_GE(wm, lam * wx + (1 - lam) * wy - 1e-10);
      }
    }
  }
}

TEST(KernelDerivatives, ConsistentWithSeparateCalls) {
  std::mt19937_64 rng(29);
  const auto dv = oracle::random_feasible(7, rng);
  const std::vector<int> ranks{1, 3, 6};
  const auto kd = kernel_derivatives(dv, QuadratureSpec{}, ranks);
  const auto d = PrizeDifferentials::feasible(dv);
  EXPECT_NEAR(kd.objective, objective_W(d), 1e-13);
  const auto l = gradient_l(d);
  for (std::size_t i = 0; i < l.size(); ++i) EXPECT_NEAR(kd.gradient[i], l[i], 1e-12);

  // Hessian block H_rs = -int K_r K_s / a^2 against an oracle integral.
  ASSERT_EQ(kd.hessian.size(), ranks.size() * ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    for (std::size_t j = 0; j < ranks.size(); ++j) {
      const double exact = -oracle::integrate([&](double z) {
        const double a = oracle::a_naive(z, dv);
        return oracle::kernel(7, ranks[i], z) * oracle::kernel(7, ranks[j], z) / (a * a);
      });
      EXPECT_NEAR(kd.hessian[i * ranks.size() + j], exact, 1e-9 * std::max(1.0, std::abs(exact)));
    }
  }
}
