#include "pmcf/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pmcf {

double RateExponents::lambda(double theta) const {
  if (!(theta >= 0.0 && theta < 1.0)) throw std::invalid_argument("lambda: 0 <= theta < 1");
  return std::min(r, s) * (1.0 - theta);
}

std::pair<double, double> beta_exponents(double k, double alpha, double gamma, double s) {
  if (!(k > 1.0)) throw std::invalid_argument("beta_exponents: k > 1 required");
  if (!(gamma > 1.0 + k)) throw std::invalid_argument("beta_exponents: gamma > 1 + k required");
  if (!(alpha > 0.0 && s > 0.0))
    throw std::invalid_argument("beta_exponents: alpha, s > 0 required");
  const double m = 2.0 - 1.0 / k;
  const double beta1 = (2.0 - s + alpha * m) / (gamma * m + 1.0 / k - 1.0);
  const double beta2 = (alpha + k * s) / (gamma - k - 1.0);
  return {beta1, beta2};
}

namespace {

// With s = alpha/gamma the equality beta1 = beta2 reads
//   (2 + alpha (m - 1/gamma)) / D1 = alpha (gamma + k) / (gamma (gamma-k-1)),
// linear in alpha. Returns a positive root or 0 if infeasible.
double equality_alpha(double k, double gamma) {
  const double m = 2.0 - 1.0 / k;
  const double d1 = gamma * m + 1.0 / k - 1.0;
  const double lhs_const = 2.0 / d1;
  const double coef = (gamma + k) / (gamma * (gamma - k - 1.0)) - (m - 1.0 / gamma) / d1;
  if (!(coef > 0.0)) return 0.0;
  return lhs_const / coef;
}

} // namespace

RateExponents optimize_rate(double k, double gamma_max, double margin, int grid_points) {
  if (!(k > 1.0)) throw std::invalid_argument("optimize_rate: k > 1 required");
  if (!(margin > 0.0 && margin < 0.5))
    throw std::invalid_argument("optimize_rate: margin in (0, 0.5) required");
  if (!(gamma_max > 1.0 + k + margin))
    throw std::invalid_argument("optimize_rate: gamma_max > 1 + k + margin required");
  if (grid_points < 2) throw std::invalid_argument("optimize_rate: grid_points >= 2");

  const double lo = 1.0 + k + margin;
  double best_obj = -1.0;
  double best_gamma = 0.0, best_alpha = 0.0;
  for (int j = 0; j <= grid_points; ++j) {
    const double gamma = lo + (gamma_max - lo) * j / grid_points;
    const double alpha = equality_alpha(k, gamma);
    if (!(alpha > 0.0)) continue;
    const double obj = alpha / gamma;
    if (obj > best_obj) {
      best_obj = obj;
      best_gamma = gamma;
      best_alpha = alpha;
    }
  }
  if (!(best_obj > 0.0)) throw std::runtime_error("optimize_rate: no feasible grid point");

  const double t = 1.0 - margin;
  RateExponents re;
  re.k = k;
  re.gamma = best_gamma;
  re.alpha = t * best_alpha;
  re.s = re.alpha / re.gamma;
  re.r = t * re.alpha / re.gamma;
  std::tie(re.beta1, re.beta2) = beta_exponents(k, re.alpha, re.gamma, re.s);
  re.feasibility_margins = {re.gamma - (1.0 + k), re.beta1 - re.beta2, re.alpha / re.gamma - re.r};
  re.at_gamma_boundary = best_gamma >= gamma_max - (gamma_max - lo) / grid_points * 0.5;
  for (double mgn : re.feasibility_margins)
    if (!(mgn > 0.0)) throw std::runtime_error("optimize_rate: infeasible after backoff");
  return re;
}

std::pair<double, double> predicted_error_bounds(const RateExponents& re,
                                                 const CouplingParams& cp, double theta,
                                                 double epsilon) {
  if (!(theta > 0.0 && theta < 0.5))
    throw std::invalid_argument("predicted_error_bounds: 0 < theta < 1/2 required");
  if (!(epsilon > 0.0)) throw std::invalid_argument("predicted_error_bounds: epsilon > 0");
  const double first = std::pow(epsilon, re.lambda(theta));
  const double h = coupled_mesh_size(cp, epsilon);
  const double second = std::pow(epsilon, -cp.gamma_ball) * std::pow(h, cp.delta);
  return {first, second};
}

} // namespace pmcf
