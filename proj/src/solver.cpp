#include "pmcf/solver.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pmcf {

void CouplingParams::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("coupling: beta > 0 required");
  if (!(c_coupling > 0.0)) throw std::invalid_argument("coupling: c_coupling > 0 required");
  if (!(mu > 2.0 && mu < 4.0)) throw std::invalid_argument("coupling: 2 < mu < 4 required");
  if (!(delta > 1.0 && delta < 0.5 + 2.0 / mu))
    throw std::invalid_argument("coupling: 1 < delta < 1/2 + 2/mu required");
  if (!(gamma_ball > 0.0)) throw std::invalid_argument("coupling: gamma_ball > 0 required");
}

double coupled_mesh_size(const CouplingParams& cp, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("coupled_mesh_size: epsilon > 0");
  return cp.c_coupling * std::pow(epsilon, cp.beta);
}

double ball_radius(const CouplingParams& cp, double epsilon) {
  return cp.c_coupling * std::pow(epsilon, -cp.gamma_ball) *
         std::pow(coupled_mesh_size(cp, epsilon), cp.delta);
}

std::string to_string(IterationMode mode) {
  return mode == IterationMode::Newton ? "newton" : "frozen";
}

double SolveReport::contraction_max() const {
  double m = 0.0;
  for (double c : contraction_estimates) m = std::max(m, c);
  return m;
}

std::string solve_report_csv_header() {
  return "epsilon,h,k,mode,iterations,final_residual,rho,ball_distance,min_eig,max_eig,"
         "contraction_max";
}

std::string solve_report_csv_row(const SolveReport& rep) {
  std::ostringstream os;
  os << format_double(rep.epsilon) << "," << format_double(rep.h) << ","
     << format_double(rep.k) << "," << to_string(rep.mode) << "," << rep.iterations << ","
     << format_double(rep.final_residual) << "," << format_double(rep.ball_radius_rho) << ","
     << format_double(rep.ball_distance) << "," << format_double(rep.ellipticity.lambda_min)
     << "," << format_double(rep.ellipticity.lambda_max) << ","
     << format_double(rep.contraction_max());
  return os.str();
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

class LinearizedSolver {
public:
  LinearizedSolver(const FeFunction& w_ref, const RegParams& rp)
      : A_(assemble_linearized(w_ref, rp)) {
    lu_.compute(A_);
    if (lu_.info() != Eigen::Success)
      throw std::runtime_error("linearized system factorization failed (singular?)");
  }

  // Solves A d = r and enforces the linear-residual contract.
  Eigen::VectorXd solve(const Eigen::VectorXd& r, double nonlinear_tol) const {
    Eigen::VectorXd d = lu_.solve(r);
    const double lin_res = (A_ * d - r).cwiseAbs().maxCoeff();
    if (!(lin_res <= std::max(0.01 * nonlinear_tol, 1e-13 * r.cwiseAbs().maxCoeff()))) {
      std::ostringstream msg;
      msg << "linear solve residual " << lin_res << " exceeds contract (ill-conditioned; "
          << "log|det| = " << lu_.logAbsDeterminant() << ")";
      throw std::runtime_error(msg.str());
    }
    return d;
  }

  const SpMat& matrix() const { return A_; }

private:
  SpMat A_;
  Eigen::SparseLU<SpMat> lu_;
};

void add_interior(FeFunction& w, const Eigen::VectorXd& d, double scale) {
  const auto& interior = w.space->interior_dofs();
  for (std::size_t i = 0; i < interior.size(); ++i)
    w.coeffs[interior[i]] += scale * d[static_cast<int>(i)];
}

double h1mu_diff_norm(const FeFunction& a, const FeFunction& b, double mu) {
  FeFunction diff = a;
  diff.coeffs -= b.coeffs;
  return norm_H1mu(diff, mu);
}

} // namespace

FeFunction apply_T(const FeFunction& w, const FeFunction& w_ref, const RegParams& rp) {
  const LinearizedSolver lin(w_ref, rp);
  const Eigen::VectorXd R = assemble_residual(w, rp);
  const Eigen::VectorXd d = lin.solve(R, 1e-10);
  FeFunction out = w;
  add_interior(out, d, -1.0);
  return out;
}

std::pair<FeFunction, SolveReport> solve_regularized(const FeFunction& init, const RegParams& rp,
                                                     const SolveOptions& opts,
                                                     const RadialProfile* reference,
                                                     const CouplingParams* coupling) {
  rp.validate();
  if (!(opts.tol > 0.0)) throw std::invalid_argument("solve: tol > 0 required");
  if (!init.in_vh()) throw std::invalid_argument("solve: init must lie in V_h");

  FeFunction w = init;
  SolveReport rep;
  rep.epsilon = rp.epsilon;
  rep.h = w.space->mesh().mesh_size_h;
  rep.k = rp.k;
  rep.mode = opts.mode;

  std::optional<LinearizedSolver> frozen;
  if (opts.mode == IterationMode::Frozen) frozen.emplace(init, rp);

  Eigen::VectorXd R = assemble_residual(w, rp);
  double res_norm = R.size() ? R.cwiseAbs().maxCoeff() : 0.0;
  double res_min = res_norm;
  FeFunction prev = w;
  double prev_step_norm = -1.0;

  int it = 0;
  while (res_norm > opts.tol) {
    if (it >= opts.max_iter) throw std::runtime_error("solve: no convergence in max_iter");
    if (res_norm > 10.0 * res_min && res_min < 1e300)
      throw std::runtime_error("solve: residual diverged");

    const LinearizedSolver* lin = frozen ? &*frozen : nullptr;
    std::optional<LinearizedSolver> fresh;
    if (!lin) {
      fresh.emplace(w, rp);
      lin = &*fresh;
    }
    const Eigen::VectorXd d = lin->solve(R, opts.tol);

    // Damped update: halve the step while it fails to reduce the residual.
    double scale = 1.0;
    FeFunction trial = w;
    Eigen::VectorXd R_trial;
    double trial_norm = 0.0;
    bool improved = false;
    for (int half = 0; half <= 10; ++half) {
      trial = w;
      add_interior(trial, d, -scale);
      R_trial = assemble_residual(trial, rp);
      trial_norm = R_trial.size() ? R_trial.cwiseAbs().maxCoeff() : 0.0;
      if (trial_norm < res_norm) {
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!improved) throw std::runtime_error("solve: damping stalled");

    const double step_norm = h1mu_diff_norm(trial, w, opts.mu);
    if (prev_step_norm > 0.0 && step_norm > 0.0)
      rep.contraction_estimates.push_back(step_norm / prev_step_norm);
    prev_step_norm = step_norm;

    w = trial;
    R.swap(R_trial);
    res_norm = trial_norm;
    res_min = std::min(res_min, res_norm);
    ++it;
  }

  rep.iterations = it;
  rep.final_residual = res_norm;
  rep.ellipticity = ellipticity_report(w, rp);
  if (coupling) rep.ball_radius_rho = ball_radius(*coupling, rp.epsilon);
  if (reference)
    rep.ball_distance = norm_H1mu_diff(w, radial_to_2d(*reference),
                                       radial_gradient_2d(*reference), opts.mu);
  return {w, rep};
}

std::pair<FeFunction, std::vector<SolveReport>> continuation_solve(
    std::shared_ptr<const P2Space> space, const RegParams& rp_target,
    const std::vector<double>& schedule, const SolveOptions& opts,
    const RadialProfile* reference) {
  rp_target.validate();
  if (schedule.empty()) throw std::invalid_argument("continuation: empty schedule");
  for (std::size_t i = 0; i + 1 < schedule.size(); ++i)
    if (!(schedule[i] > schedule[i + 1]))
      throw std::invalid_argument("continuation: schedule must strictly decrease");
  if (std::abs(schedule.back() - rp_target.epsilon) > 1e-12 * rp_target.epsilon)
    throw std::invalid_argument("continuation: schedule must end at the target epsilon");

  FeFunction w(space);
  std::vector<SolveReport> reports;
  for (std::size_t stage = 0; stage < schedule.size(); ++stage) {
    RegParams rp = rp_target;
    rp.epsilon = schedule[stage];
    try {
      auto [sol, rep] = solve_regularized(w, rp, opts, reference);
      w = sol;
      reports.push_back(rep);
    } catch (const std::exception& e) {
      throw std::runtime_error("continuation stage " + std::to_string(stage) + " (eps=" +
                               std::to_string(rp.epsilon) + ") failed: " + e.what());
    }
  }
  return {w, reports};
}

std::vector<CoupledStage> coupled_continuation_solve(const DomainGeometry& domain,
                                                     const RegParams& rp_target,
                                                     const CouplingParams& cp,
                                                     const std::vector<double>& schedule,
                                                     const SolveOptions& opts,
                                                     bool reference_against_oracle) {
  cp.validate();
  if (schedule.empty()) return {};
  std::vector<CoupledStage> stages;
  std::shared_ptr<const P2Space> prev_space;
  FeFunction prev(std::make_shared<const P2Space>(
      std::make_shared<const TriMesh>(build_mesh(domain, coupled_mesh_size(cp, schedule[0])))));
  prev_space = prev.space;

  for (std::size_t i = 0; i < schedule.size(); ++i) {
    RegParams rp = rp_target;
    rp.epsilon = schedule[i];
    const double h = coupled_mesh_size(cp, rp.epsilon);
    std::shared_ptr<const P2Space> space =
        i == 0 ? prev_space : make_p2_space(build_mesh(domain, h));

    FeFunction init(space);
    if (i > 0) {
      // Warm start: re-interpolate the previous stage (clamped point
      // location covers dofs marginally outside the coarser polygon).
      for (int d = 0; d < space->n_dofs(); ++d) {
        const auto [t, l] = prev.space->locate_clamped(space->dof_points()[d]);
        init.coeffs[d] = prev.value_in_tri(t, l);
      }
      init = boundary_correct(init);
    }

    std::optional<RadialProfile> oracle;
    const RadialProfile* ref = nullptr;
    if (reference_against_oracle && domain.kind() == DomainGeometry::Kind::Disk) {
      oracle = radial_regularized_solve(rp, domain.semi_axis_a(), 256, 1e-9);
      ref = &*oracle;
    }
    try {
      auto [sol, rep] = solve_regularized(init, rp, opts, ref, &cp);
      stages.push_back({rp.epsilon, sol.space->mesh().mesh_size_h, sol, rep});
      prev = sol;
    } catch (const std::exception& e) {
      throw std::runtime_error("coupled stage " + std::to_string(i) + " (eps=" +
                               std::to_string(rp.epsilon) + ") failed: " + e.what());
    }
  }
  return stages;
}

double contraction_probe(const FeFunction& w_ref, const RegParams& rp, double sigma, int trials,
                         double mu, unsigned seed) {
  if (trials < 1) throw std::invalid_argument("contraction_probe: trials >= 1");
  const LinearizedSolver lin(w_ref, rp);
  const auto space = w_ref.space;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  // Smooth random perturbations: interpolate a random low-order trig
  // polynomial and zero its boundary coefficients.
  auto random_smooth = [&]() {
    std::array<double, 8> a;
    for (double& x : a) x = unif(rng);
    auto fn = [a](const Vec2& p) {
      return a[0] + a[1] * p.x() + a[2] * p.y() + a[3] * p.x() * p.y() +
             a[4] * std::sin(2.0 * p.x() + a[5]) + a[6] * std::cos(2.0 * p.y() + a[7]);
    };
    return boundary_correct(interpolate(space, fn));
  };

  auto apply_frozen = [&](const FeFunction& w) {
    const Eigen::VectorXd R = assemble_residual(w, rp);
    const Eigen::VectorXd d = lin.solve(R, 1e-10);
    FeFunction out = w;
    add_interior(out, d, -1.0);
    return out;
  };

  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    FeFunction pa = random_smooth(), pb = random_smooth();
    FeFunction v = w_ref, w = w_ref;
    v.coeffs += sigma * pa.coeffs;
    w.coeffs += sigma * pb.coeffs;
    const double denom = h1mu_diff_norm(v, w, mu);
    if (denom < 1e-300) continue;
    const double num = h1mu_diff_norm(apply_frozen(v), apply_frozen(w), mu);
    worst = std::max(worst, num / denom);
  }
  return worst;
}

} // namespace pmcf
