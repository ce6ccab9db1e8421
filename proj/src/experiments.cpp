#include "pmcf/experiments.hpp"

#include "pmcf/oracle.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace pmcf {

std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& steps) {
  if (errors.size() != steps.size() || errors.size() < 2)
    throw std::invalid_argument("eoc: need matching lists of length >= 2");
  for (double e : errors)
    if (!(e > 0.0)) throw std::invalid_argument("eoc: errors must be positive");
  for (std::size_t i = 0; i + 1 < steps.size(); ++i)
    if (!(steps[i] > steps[i + 1] && steps[i + 1] > 0.0))
      throw std::invalid_argument("eoc: steps must be positive and strictly decreasing");
  std::vector<double> out(errors.size() - 1);
  for (std::size_t i = 0; i + 1 < errors.size(); ++i)
    out[i] = std::log(errors[i] / errors[i + 1]) / std::log(steps[i] / steps[i + 1]);
  return out;
}

SlopeFit fit_loglog_slope(const std::vector<double>& steps, const std::vector<double>& errors) {
  if (steps.size() != errors.size() || steps.size() < 2)
    throw std::invalid_argument("fit_loglog_slope: need matching lists of length >= 2");
  const std::size_t n = steps.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log(steps[i]);
    y[i] = std::log(errors[i]);
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double yhat = my + fit.slope * (x[i] - mx);
    ss += (y[i] - yhat) * (y[i] - yhat);
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

namespace {

// 1D C0 and Hoelder errors of a profile against the exact arrival time,
// evaluated on a fixed uniform grid (colinear pairs dominate the seminorm
// of a radial function, so 1D pairs suffice).
struct OneDErrors {
  double c0 = 0.0;
  double holder = 0.0;
};
OneDErrors profile_vs_exact(const RadialProfile& prof, double k, double R, double theta) {
  const int m = 1400; // below the pair cap, so the pair scan is exhaustive
  SampleSet s;
  s.points.reserve(m + 1);
  s.values.reserve(m + 1);
  for (int i = 0; i <= m; ++i) {
    const double r = R * i / m;
    s.points.push_back(Vec2(r, 0.0));
    s.values.push_back(prof.value(r) - exact_disk_arrival_time(k, R, Vec2(r, 0.0)));
  }
  OneDErrors out;
  out.c0 = c0_of_samples(s);
  if (theta > 0.0) out.holder = holder_of_samples(s, theta);
  return out;
}

std::vector<double> halving_schedule(double eps_target, double eps_start = 2.0) {
  std::vector<double> sched;
  double e = std::max(eps_target, eps_start);
  while (e > eps_target * (1.0 + 1e-12)) {
    sched.push_back(e);
    e /= 2.0;
  }
  sched.push_back(eps_target);
  return sched;
}

} // namespace

EpsStudy run_epsilon_study(double k, double theta, const std::vector<double>& eps_list, double R,
                           double oracle_tol) {
  if (!(theta >= 0.0 && theta < 1.0))
    throw std::invalid_argument("epsilon study: 0 <= theta < 1 required");
  EpsStudy study;
  study.k = k;
  study.theta = theta;
  study.R = R;
  for (double eps : eps_list) {
    RegParams rp{eps, k};
    const RadialProfile prof = radial_regularized_solve(rp, R, 256, oracle_tol);
    const OneDErrors err = profile_vs_exact(prof, k, R, theta);
    study.rows.push_back({eps, err.c0, theta > 0.0 ? err.c0 + err.holder : err.c0});
  }
  if (study.rows.size() >= 2) {
    std::vector<double> epss, c0s, hs;
    for (const auto& row : study.rows) {
      epss.push_back(row.epsilon);
      c0s.push_back(row.c0_error);
      hs.push_back(row.holder_error);
    }
    study.c0_fit = fit_loglog_slope(epss, c0s);
    study.holder_fit = fit_loglog_slope(epss, hs);
    const RateExponents re = optimize_rate(k, 7.0, 1e-3);
    study.predicted_min_rs = std::min(re.r, re.s);
    study.predicted_lambda = re.lambda(theta);
    study.slopes_meet_prediction = study.c0_fit.slope >= study.predicted_min_rs &&
                                   (theta == 0.0 || study.holder_fit.slope >= study.predicted_lambda);
  }
  return study;
}

HStudy run_h_study(double k, double epsilon, const std::vector<double>& h_list, double mu,
                   double R, double tol) {
  HStudy study;
  study.k = k;
  study.epsilon = epsilon;
  study.mu = mu;
  const RegParams rp{epsilon, k};
  const RadialProfile prof = radial_regularized_solve(rp, R, 256, 1e-10);
  const auto ref = radial_to_2d(prof);
  const auto ref_grad = radial_gradient_2d(prof);
  const DomainGeometry domain = DomainGeometry::disk(R);
  SolveOptions opts;
  opts.tol = tol;
  opts.mu = mu;
  for (double h : h_list) {
    auto space = make_p2_space(build_mesh(domain, h));
    auto [w, reports] = continuation_solve(space, rp, halving_schedule(epsilon), opts, &prof);
    double c0 = 0.0;
    for (int d = 0; d < space->n_dofs(); ++d)
      c0 = std::max(c0, std::abs(w.coeffs[d] - ref(space->dof_points()[d])));
    const double h1 = norm_H1mu_diff(w, ref, ref_grad, mu);
    int its = 0;
    for (const auto& rep : reports) its += rep.iterations;
    study.rows.push_back({space->mesh().mesh_size_h, h1, c0, its});
  }
  if (study.rows.size() >= 2) {
    std::vector<double> hs, h1s, c0s;
    for (const auto& row : study.rows) {
      hs.push_back(row.h);
      h1s.push_back(row.h1mu_error);
      c0s.push_back(row.c0_error);
    }
    study.h1mu_fit = fit_loglog_slope(hs, h1s);
    study.c0_fit = fit_loglog_slope(hs, c0s);
  }
  return study;
}

CoupledStudy run_coupled_study(double k, double theta, const CouplingParams& cp,
                               const std::vector<double>& schedule, double R, double tol) {
  if (!(theta > 0.0 && theta < 0.5))
    throw std::invalid_argument("coupled study: 0 < theta < 1/2 required");
  CoupledStudy study;
  study.k = k;
  study.theta = theta;
  study.coupling = cp;
  if (schedule.empty()) return study;

  const DomainGeometry domain = DomainGeometry::disk(R);
  RegParams rp_target{schedule.back(), k};
  SolveOptions opts;
  opts.tol = tol;
  opts.mu = cp.mu;
  const auto stages = coupled_continuation_solve(domain, rp_target, cp, schedule, opts);
  for (const auto& stage : stages) {
    const auto diff = sample_difference(
        stage.solution, [&](const Vec2& p) { return exact_disk_arrival_time(k, R, p); }, 1);
    const double c0 = c0_of_samples(diff);
    const double sem = holder_of_samples(diff, theta);
    study.rows.push_back({stage.epsilon, stage.h, c0, c0 + sem});
  }
  study.monotone_decreasing = true;
  for (std::size_t i = 0; i + 1 < study.rows.size(); ++i)
    if (!(study.rows[i + 1].total_error < study.rows[i].total_error))
      study.monotone_decreasing = false;
  if (study.rows.size() >= 2) {
    std::vector<double> epss, totals;
    for (const auto& row : study.rows) {
      epss.push_back(row.epsilon);
      totals.push_back(row.total_error);
    }
    study.total_fit = fit_loglog_slope(epss, totals);
    const RateExponents re = optimize_rate(k, 7.0, 1e-3);
    study.predicted_lambda = re.lambda(theta);
    study.slope_meets_prediction = study.total_fit.slope >= study.predicted_lambda;
  }
  return study;
}

void write_eps_study_csv(std::ostream& os, const EpsStudy& s) {
  os << "epsilon,c0_error" << (s.theta > 0.0 ? ",c0theta_error" : "") << "\n";
  for (const auto& row : s.rows) {
    os << format_double(row.epsilon) << "," << format_double(row.c0_error);
    if (s.theta > 0.0) os << "," << format_double(row.holder_error);
    os << "\n";
  }
  if (s.rows.size() >= 2) {
    os << "# fitted_c0_slope " << format_double(s.c0_fit.slope) << "\n";
    if (s.theta > 0.0)
      os << "# fitted_c0theta_slope " << format_double(s.holder_fit.slope) << "\n";
    os << "# predicted_min_rs " << format_double(s.predicted_min_rs) << "\n";
    os << "# predicted_lambda " << format_double(s.predicted_lambda) << "\n";
    os << "# slopes_meet_prediction " << (s.slopes_meet_prediction ? 1 : 0) << "\n";
  }
}

void write_h_study_csv(std::ostream& os, const HStudy& s) {
  os << "h,h1mu_error,c0_error,iterations\n";
  for (const auto& row : s.rows)
    os << format_double(row.h) << "," << format_double(row.h1mu_error) << ","
       << format_double(row.c0_error) << "," << row.iterations << "\n";
  if (s.rows.size() >= 2) {
    os << "# fitted_h1mu_slope " << format_double(s.h1mu_fit.slope) << "\n";
    os << "# fitted_c0_slope " << format_double(s.c0_fit.slope) << "\n";
  }
}

void write_coupled_study_csv(std::ostream& os, const CoupledStudy& s) {
  os << "epsilon,h,c0_error,c0theta_error\n";
  for (const auto& row : s.rows)
    os << format_double(row.epsilon) << "," << format_double(row.h) << ","
       << format_double(row.c0_error) << "," << format_double(row.total_error) << "\n";
  if (s.rows.size() >= 2) {
    os << "# fitted_total_slope " << format_double(s.total_fit.slope) << "\n";
    os << "# predicted_lambda " << format_double(s.predicted_lambda) << "\n";
    os << "# monotone_decreasing " << (s.monotone_decreasing ? 1 : 0) << "\n";
    os << "# slope_meets_prediction " << (s.slope_meets_prediction ? 1 : 0) << "\n";
  }
}

} // namespace pmcf
