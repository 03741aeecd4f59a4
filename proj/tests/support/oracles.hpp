// Reference implementations for tests. Everything here is written
// independently of the library: exact binomial coefficients, direct
// polynomial evaluation, Boost's adaptive Gauss-Kronrod, plain bisection.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

inline long double choose(int n, int k) {
  if (k < 0 || k > n) return 0.0L;
  long double c = 1.0L;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

inline long double factorial(int n) {
  long double f = 1.0L;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// K_r(z) = (n-1) C(n-2, r-1) (1-z)^(r-1) z^(n-1-r)
inline double kernel(int n, int r, double z) {
  return static_cast<double>((n - 1) * choose(n - 2, r - 1) * std::pow(1.0L - z, r - 1) *
                             std::pow(static_cast<long double>(z), n - 1 - r));
}

inline double a_naive(double z, const std::vector<double>& d) {
  const int n = static_cast<int>(d.size()) + 1;
  long double s = 0.0L;
  for (int r = 1; r <= n - 1; ++r) s += d[static_cast<std::size_t>(r - 1)] * kernel(n, r, z);
  return static_cast<double>(s);
}

inline double integrate(const std::function<double(double)>& f, double a = 0.0, double b = 1.0) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

inline double W(const std::vector<double>& d) {
  return integrate([&](double z) { return std::log(a_naive(z, d)); });
}

inline std::vector<double> ell(const std::vector<double>& d) {
  const int n = static_cast<int>(d.size()) + 1;
  std::vector<double> out;
  for (int r = 1; r <= n - 1; ++r) {
    out.push_back(integrate([&](double z) { return kernel(n, r, z) / a_naive(z, d); }));
  }
  return out;
}

template <class F>
double bisect(F f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  if (flo * f(hi) > 0) throw std::invalid_argument("bisect: root not bracketed");
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// n = 3 with both ranks active: a(z) = alpha + beta z, alpha = 2 d2,
// beta = 2 (d1 - d2), and l_1 = int 2 z / a.
inline double n3_l1(double d1) {
  const double d2 = (1.0 - d1) / 2.0;
  const double alpha = 2.0 * d2;
  const double beta = 2.0 * (d1 - d2);
  return 2.0 * (1.0 / beta - alpha / (beta * beta) * std::log((alpha + beta) / alpha));
}

inline double n3_d1() {
  return bisect([](double d1) { return n3_l1(d1) - 1.0; }, 0.34, 0.999);
}

// n = 4 with d2 = 0: solve l_1(d1, 0, d3) = 1 on the budget line d1 + 3 d3 = 1.
inline std::vector<double> n4_d() {
  const double d3 = bisect(
      [](double d3) {
        const std::vector<double> d{1.0 - 3.0 * d3, 0.0, d3};
        return ell(d)[0] - 1.0;
      },
      0.01, 0.3, 60);
  return {1.0 - 3.0 * d3, 0.0, d3};
}

inline double pairwise_gini(const std::vector<double>& v) {
  double num = 0.0;
  double total = 0.0;
  for (double x : v) {
    total += x;
    for (double y : v) num += std::abs(x - y);
  }
  return num / (2.0 * static_cast<double>(v.size()) * total);
}

// Random d on the budget plane with every entry at least `floor` before scaling.
inline std::vector<double> random_feasible(int n, std::mt19937_64& rng, double floor = 0.05) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  std::vector<double> d(static_cast<std::size_t>(n - 1));
  double budget = 0.0;
  for (int r = 1; r <= n - 1; ++r) {
    d[static_cast<std::size_t>(r - 1)] = u(rng);
    budget += r * d[static_cast<std::size_t>(r - 1)];
  }
  for (double& x : d) x /= budget;
  return d;
}

// Reference prize schedules for n = 3..10, rounded to 4 decimals.
inline const std::vector<std::vector<double>>& reference_table() {
  static const std::vector<std::vector<double>> t = {
      {0.9055, 0.0945, 0},
      {0.7979, 0.1011, 0.1011, 0},
      {0.6934, 0.1274, 0.1274, 0.0518, 0},
      {0.6204, 0.1304, 0.1304, 0.0893, 0.0296, 0},
      {0.5644, 0.1248, 0.1248, 0.1248, 0.0340, 0.0272, 0},
      {0.5107, 0.1280, 0.1280, 0.1280, 0.0440, 0.0440, 0.0173, 0},
      {0.4680, 0.1276, 0.1276, 0.1276, 0.0536, 0.0521, 0.0298, 0.0138, 0},
      {0.4341, 0.1244, 0.1244, 0.1244, 0.0690, 0.0456, 0.0456, 0.0211, 0.0114, 0},
  };
  return t;
}

}  // namespace oracle
