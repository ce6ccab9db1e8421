#pragma once

#include "pmcf/operators.hpp"
#include "pmcf/oracle.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pmcf {

/// epsilon-h coupling h <= c eps^beta and the ball radius rho = c eps^-gamma h^delta.
struct CouplingParams {
  double beta = 2.0;
  double c_coupling = 0.5;
  double delta = 1.1;      // 1 < delta < 1/2 + 2/mu
  double gamma_ball = 0.5; // rho exponent
  double mu = 3.0;         // n+1 < mu < 4
  void validate() const;
};

double coupled_mesh_size(const CouplingParams& cp, double epsilon);
double ball_radius(const CouplingParams& cp, double epsilon);

enum class IterationMode { Newton, Frozen };
std::string to_string(IterationMode mode);

struct SolveOptions {
  IterationMode mode = IterationMode::Newton;
  double tol = 1e-10; // max-norm of the interior residual vector
  int max_iter = 50;
  double mu = 3.0; // norm for contraction estimates
};

struct SolveReport {
  double epsilon = 0.0;
  double h = 0.0;
  double k = 0.0;
  IterationMode mode = IterationMode::Newton;
  int iterations = 0;
  double final_residual = 0.0;
  double ball_radius_rho = 0.0; // c eps^-gamma h^delta when coupling given
  double ball_distance = 0.0;   // H^{1,mu} distance to the oracle reference
  std::vector<double> contraction_estimates;
  EllipticityReport ellipticity;
  double contraction_max() const;
};

/// CSV row: epsilon,h,k,mode,iterations,final_residual,rho,ball_distance,
/// min_eig,max_eig,contraction_max
std::string solve_report_csv_header();
std::string solve_report_csv_row(const SolveReport& rep);

/// One application of the frozen-linearization map:
/// solve A(w_ref) d = R(w), return w - d.
FeFunction apply_T(const FeFunction& w, const FeFunction& w_ref, const RegParams& rp);

/// Drives the interior residual below tol. Newton mode re-linearizes each
/// step (with residual-decrease damping); frozen mode keeps the init
/// linearization, which is the fixed-point map studied by the contraction
/// estimates.
std::pair<FeFunction, SolveReport> solve_regularized(
    const FeFunction& init, const RegParams& rp, const SolveOptions& opts = {},
    const RadialProfile* reference = nullptr, const CouplingParams* coupling = nullptr);

/// Warm-started epsilon continuation on a fixed mesh.
std::pair<FeFunction, std::vector<SolveReport>> continuation_solve(
    std::shared_ptr<const P2Space> space, const RegParams& rp_target,
    const std::vector<double>& schedule, const SolveOptions& opts = {},
    const RadialProfile* reference = nullptr);

/// Coupled continuation: stage i runs on a fresh mesh with
/// h_i = coupled_mesh_size(cp, eps_i); warm starts are re-interpolated.
struct CoupledStage {
  double epsilon;
  double h;
  FeFunction solution;
  SolveReport report;
};
std::vector<CoupledStage> coupled_continuation_solve(
    const DomainGeometry& domain, const RegParams& rp_target, const CouplingParams& cp,
    const std::vector<double>& schedule, const SolveOptions& opts = {},
    bool reference_against_oracle = false);

/// Empirical Lipschitz constant of the frozen T on perturbation pairs of
/// scale sigma around w_ref, measured in H^{1,mu}.
double contraction_probe(const FeFunction& w_ref, const RegParams& rp, double sigma,
                         int trials, double mu = 3.0, unsigned seed = 20130813);

} // namespace pmcf
