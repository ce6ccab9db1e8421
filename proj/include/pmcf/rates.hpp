#pragma once

#include "pmcf/solver.hpp"

#include <array>
#include <utility>

namespace pmcf {

/// Convergence-rate exponents with certified feasibility margins:
/// gamma > 1+k, beta1 > beta2, 0 < r < alpha/gamma. The Hoelder rate is
/// lambda(theta) = min(r, s) (1 - theta).
struct RateExponents {
  double k = 2.0;
  double alpha = 0.0;
  double gamma = 0.0;
  double s = 0.0;
  double r = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  // {gamma - (1+k), beta1 - beta2, alpha/gamma - r}
  std::array<double, 3> feasibility_margins{};
  bool at_gamma_boundary = false; // objective maximized at gamma_max

  double lambda(double theta) const;
};

/// beta1 = (2 - s + alpha (2 - 1/k)) / (gamma (2 - 1/k) + 1/k - 1),
/// beta2 = (alpha + k s) / (gamma - k - 1).
std::pair<double, double> beta_exponents(double k, double alpha, double gamma, double s);

/// Deterministic gamma grid search with s = alpha/gamma; at each gamma the
/// equality beta1 = beta2 is linear in alpha. The best objective alpha/gamma
/// is then backed off by (1 - margin) on (alpha, s) and once more for r so
/// every strict inequality holds with a certified positive margin.
RateExponents optimize_rate(double k, double gamma_max, double margin, int grid_points = 2000);

/// Shape-only bounds (constants set to 1): (eps^lambda, eps^-gamma h^delta)
/// with h = c eps^beta from the coupling.
std::pair<double, double> predicted_error_bounds(const RateExponents& re,
                                                 const CouplingParams& cp, double theta,
                                                 double epsilon);

} // namespace pmcf
