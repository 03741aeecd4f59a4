// Composite Gauss-Legendre quadrature on [0, 1] with panel doubling.
#pragma once

#include <functional>
#include <span>
#include <vector>

namespace rtourn {

struct QuadratureSpec {
  int order = 32;            // nodes per panel
  int panels = 16;           // equal subintervals of [0, 1]
  double refine_tol = 1e-10; // relative change allowed between panel doublings
  int max_doublings = 10;    // give up (DivergentIntegral) after this many

  void validate() const;
};

/// How the outermost panels are treated.
///
/// `singular` replaces the first and last panel by geometrically graded
/// sub-panels so integrands with log-type endpoint singularities converge.
enum class EndpointMode { regular, singular };

/// Gauss-Legendre rule on [-1, 1]. Rules are cached per order and shared.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  static const GaussLegendreRule& of_order(int order);
};

/// Integrand writing `out.size()` components at z.
using VectorIntegrand = std::function<void(double z, std::span<double> out)>;

/// Integrates a vector-valued function over [0, 1]. Starts with spec.panels
/// panels and doubles until every component changes by at most
/// refine_tol * max(1, |I_i|). Summation order is fixed, so results are
/// deterministic for a given spec.
std::vector<double> integrate_unit(std::size_t dim, const VectorIntegrand& f,
                                   const QuadratureSpec& spec,
                                   EndpointMode mode = EndpointMode::regular);

double integrate_unit(const std::function<double(double)>& f, const QuadratureSpec& spec,
                      EndpointMode mode = EndpointMode::regular);

/// One composite pass with a fixed panel count; no refinement check.
std::vector<double> integrate_unit_fixed(std::size_t dim, const VectorIntegrand& f, int order,
                                         int panels);

/// Single fixed-order Gauss-Legendre pass over [a, b]; no refinement.
double integrate_interval(const std::function<double(double)>& f, double a, double b, int order);

}  // namespace rtourn
