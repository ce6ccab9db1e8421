#pragma once

#include "pmcf/rates.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace pmcf {

/// EOC_i = log(e_i/e_{i+1}) / log(s_i/s_{i+1}).
std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& step_sizes);

/// Least-squares slope of log(e) against log(s), with fit RMS residual.
struct SlopeFit {
  double slope = 0.0;
  double residual = 0.0;
};
SlopeFit fit_loglog_slope(const std::vector<double>& step_sizes,
                          const std::vector<double>& errors);

/// Regularization error against the closed-form disk solution, measured at
/// 1D oracle accuracy (no FE involved). holder_error is the full C^{0,theta}
/// norm; for theta = 0 it coincides with the C0 column.
struct EpsStudyRow {
  double epsilon;
  double c0_error;
  double holder_error;
};
struct EpsStudy {
  double k = 2.0;
  double theta = 0.25;
  double R = 1.0;
  std::vector<EpsStudyRow> rows;
  SlopeFit c0_fit, holder_fit;
  double predicted_min_rs = 0.0;     // min(r,s) from optimize_rate
  double predicted_lambda = 0.0;     // min(r,s)(1-theta)
  bool slopes_meet_prediction = false;
};
EpsStudy run_epsilon_study(double k, double theta, const std::vector<double>& eps_list,
                           double R = 1.0, double oracle_tol = 1e-10);

/// Fixed-epsilon h-refinement against the radial oracle.
struct HStudyRow {
  double h;          // measured mesh size
  double h1mu_error; // H^{1,mu}(Omega_h) distance to the oracle
  double c0_error;   // max nodal error
  int iterations;
};
struct HStudy {
  double k = 2.0;
  double epsilon = 0.25;
  double mu = 3.0;
  std::vector<HStudyRow> rows;
  SlopeFit h1mu_fit, c0_fit;
};
HStudy run_h_study(double k, double epsilon, const std::vector<double>& h_list, double mu = 3.0,
                   double R = 1.0, double tol = 1e-10);

/// Coupled epsilon-h study against the exact disk solution.
struct CoupledStudyRow {
  double epsilon;
  double h;
  double c0_error;
  double total_error; // C^{0,theta} norm (C0 + seminorm)
};
struct CoupledStudy {
  double k = 2.0;
  double theta = 0.25;
  CouplingParams coupling;
  std::vector<CoupledStudyRow> rows;
  SlopeFit total_fit;
  double predicted_lambda = 0.0;
  bool monotone_decreasing = false;
  bool slope_meets_prediction = false;
};
CoupledStudy run_coupled_study(double k, double theta, const CouplingParams& cp,
                               const std::vector<double>& schedule, double R = 1.0,
                               double tol = 1e-10);

void write_eps_study_csv(std::ostream& os, const EpsStudy& s);
void write_h_study_csv(std::ostream& os, const HStudy& s);
void write_coupled_study_csv(std::ostream& os, const CoupledStudy& s);

} // namespace pmcf
