// Beta-kernel mixture a(z; d) and the concave design objective built on it.
//
//   a(z; d) = sum_r r C(n-1, r) z^(n-r-1) (1-z)^(r-1) d_r
//           = (n-1) E[d_{S+1}],  S ~ Binomial(n-2, 1-z)
//   W(d)    = int_0^1 log a(z; d) dz
//   l_r(d)  = dW/dd_r = int_0^1 K_r(z) / a(z; d) dz
//
// where K_r(z) = (n-1) P(S = r-1) is the density of a uniform order statistic.
#pragma once

#include <span>
#include <vector>

#include "rtourn/quadrature.hpp"
#include "rtourn/types.hpp"

namespace rtourn {

/// Binomial(trials, p) probabilities written to out[0..trials]. Uses the
/// multiplicative recurrence outward from the mode followed by normalisation,
/// so no binomial coefficient is ever formed.
void binomial_pmf(int trials, double p, std::span<double> out);

/// Beta kernels K_r(z), r = 1..n-1, written to out[0..n-2].
void beta_kernels(int n, double z, std::span<double> out);

double eval_a(double z, const PrizeDifferentials& d);

/// a(z; d) for a raw differential vector; no validation.
double eval_a_unchecked(double z, std::span<const double> d);

double objective_W(const PrizeDifferentials& d, const QuadratureSpec& q = {},
                   EndpointMode mode = EndpointMode::regular);

std::vector<double> gradient_l(const PrizeDifferentials& d, const QuadratureSpec& q = {});

/// W, l and optionally the Hessian block over `hessian_ranks` (1-based),
/// all from a single quadrature pass. The Hessian is
///   H_rs = -int K_r K_s / a^2 dz
/// stored row-major, |ranks| x |ranks|.
struct KernelDerivatives {
  double objective = 0.0;
  std::vector<double> gradient;
  std::vector<double> hessian;
};

KernelDerivatives kernel_derivatives(std::span<const double> d, const QuadratureSpec& q,
                                     std::span<const int> hessian_ranks = {});

}  // namespace rtourn
