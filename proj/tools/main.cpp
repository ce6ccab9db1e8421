#include "pmcf/experiments.hpp"
#include "pmcf/rates.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

namespace {

using namespace pmcf;

// Plain key=value configuration: one pair per line, '#' comments.
// Command-line flags override file values.
class Config {
public:
  void load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw CLI::ValidationError("--config", "cannot open " + path);
    std::string line;
    while (std::getline(is, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      const std::string val = trim(line.substr(eq + 1));
      if (!key.empty()) kv_[key] = val;
    }
  }

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  template <typename T>
  void fill(const CLI::App* cmd, const std::string& flag, const std::string& key, T& var) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return;
    if (cmd->count(flag) > 0) return; // explicit flag wins
    std::istringstream is(it->second);
    is >> var;
    if (is.fail()) throw CLI::ValidationError(key, "bad config value: " + it->second);
  }
  void fill(const CLI::App* cmd, const std::string& flag, const std::string& key,
            std::string& var) const {
    const auto it = kv_.find(key);
    if (it != kv_.end() && cmd->count(flag) == 0) var = it->second;
  }
  void fill(const CLI::App* cmd, const std::string& flag, const std::string& key,
            std::vector<double>& var) const {
    const auto it = kv_.find(key);
    if (it != kv_.end() && cmd->count(flag) == 0) var = parse_list(it->second);
  }
  void fill(const CLI::App* cmd, const std::string& flag, const std::string& key,
            bool& var) const {
    const auto it = kv_.find(key);
    if (it == kv_.end() || cmd->count(flag) > 0) return;
    var = it->second == "true" || it->second == "1" || it->second == "yes";
  }

  static std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::string token;
    std::istringstream is(text);
    while (std::getline(is, token, ',')) {
      if (token.empty()) continue;
      out.push_back(std::stod(token));
    }
    return out;
  }

private:
  std::map<std::string, std::string> kv_;
};

class Output {
public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw CLI::ValidationError("--output", "cannot open " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
  std::ofstream file_;
};

DomainGeometry make_domain(const std::string& name, double R, double a, double b) {
  if (name == "disk") return DomainGeometry::disk(R);
  if (name == "ellipse") return DomainGeometry::ellipse(a, b);
  throw CLI::ValidationError("--domain", "expected disk or ellipse");
}

std::vector<double> default_schedule(double eps_target) {
  std::vector<double> sched;
  double e = std::max(eps_target, 2.0);
  while (e > eps_target * (1.0 + 1e-12)) {
    sched.push_back(e);
    e /= 2.0;
  }
  sched.push_back(eps_target);
  return sched;
}

struct SchemaFlag {
  static void add(CLI::App* cmd, const std::string& text) {
    cmd->add_flag_callback(
        "--schema",
        [text] {
          std::cout << text;
          throw CLI::Success();
        },
        "print the CSV columns this command emits and exit");
  }
};

int run_solve(const CLI::App* cmd, const Config& cfg, std::string domain_name, double R, double a,
              double b, double k, double epsilon, double mesh_h, std::vector<double> schedule,
              std::string mode, double tol, int max_iter, double mu, bool coupled, double beta,
              double c_coupling, double delta, double gamma_ball, bool oracle_ref,
              std::string output, std::string dump_solution, std::string dump_mesh,
              std::string dump_matrix) {
  cfg.fill(cmd, "--domain", "domain", domain_name);
  cfg.fill(cmd, "--R", "R", R);
  cfg.fill(cmd, "--a", "a", a);
  cfg.fill(cmd, "--b", "b", b);
  cfg.fill(cmd, "--k", "k", k);
  cfg.fill(cmd, "--epsilon", "epsilon", epsilon);
  cfg.fill(cmd, "--mesh-h", "mesh.h", mesh_h);
  cfg.fill(cmd, "--schedule", "schedule", schedule);
  cfg.fill(cmd, "--mode", "mode", mode);
  cfg.fill(cmd, "--tol", "tol", tol);
  cfg.fill(cmd, "--max-iter", "max_iter", max_iter);
  cfg.fill(cmd, "--mu", "mu", mu);
  cfg.fill(cmd, "--coupled", "coupled", coupled);
  cfg.fill(cmd, "--beta", "beta", beta);
  cfg.fill(cmd, "--c-coupling", "c_coupling", c_coupling);
  cfg.fill(cmd, "--delta", "delta", delta);
  cfg.fill(cmd, "--gamma-ball", "gamma_ball", gamma_ball);
  cfg.fill(cmd, "--output", "output", output);

  const DomainGeometry domain = make_domain(domain_name, R, a, b);
  CouplingParams cp;
  cp.beta = beta;
  cp.c_coupling = c_coupling;
  cp.delta = delta;
  cp.gamma_ball = gamma_ball;
  cp.mu = mu;
  if (coupled) mesh_h = coupled_mesh_size(cp, epsilon);

  auto space = make_p2_space(build_mesh(domain, mesh_h));
  if (schedule.empty()) schedule = default_schedule(epsilon);

  SolveOptions opts;
  opts.mode = mode == "frozen" ? IterationMode::Frozen : IterationMode::Newton;
  opts.tol = tol;
  opts.max_iter = max_iter;
  opts.mu = mu;

  std::unique_ptr<RadialProfile> prof;
  if (oracle_ref && domain.kind() == DomainGeometry::Kind::Disk) {
    RegParams rp{epsilon, k};
    prof = std::make_unique<RadialProfile>(radial_regularized_solve(rp, R, 256, 1e-9));
  }

  RegParams rp{epsilon, k};
  auto [w, reports] = continuation_solve(space, rp, schedule, opts, prof.get());
  for (auto& rep : reports) rep.ball_radius_rho = coupled ? ball_radius(cp, rep.epsilon) : 0.0;

  Output out(output);
  out.stream() << solve_report_csv_header() << "\n";
  for (const auto& rep : reports) out.stream() << solve_report_csv_row(rep) << "\n";

  if (!dump_solution.empty()) {
    std::ofstream os(dump_solution);
    write_fe_function(os, w);
  }
  if (!dump_mesh.empty()) save_mesh(dump_mesh, space->mesh());
  if (!dump_matrix.empty()) {
    std::ofstream os(dump_matrix);
    write_matrix_triplets(os, assemble_linearized(w, rp));
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-element lab for the regularized level-set power mean curvature flow"};
  app.require_subcommand(1);
  Config cfg;
  std::string config_path;
  app.add_option("--config", config_path, "key=value configuration file")
      ->each([&cfg](const std::string& path) { cfg.load(path); });

  // --- solve ---
  auto* solve = app.add_subcommand("solve", "solve the regularized equation on one mesh");
  std::string domain_name = "disk", mode = "newton", output = "-";
  std::string dump_solution, dump_mesh, dump_matrix;
  double R = 1.0, a = 1.0, b = 1.0, k = 2.0, epsilon = 0.25, mesh_h = 0.1;
  double tol = 1e-10, mu = 3.0;
  double beta = 2.0, c_coupling = 0.5, delta = 1.1, gamma_ball = 0.5;
  int max_iter = 50;
  bool coupled = false, oracle_ref = false;
  std::vector<double> schedule;
  solve->add_option("--domain", domain_name, "disk | ellipse");
  solve->add_option("--R", R, "disk radius");
  solve->add_option("--a", a, "ellipse semi-axis a");
  solve->add_option("--b", b, "ellipse semi-axis b");
  solve->add_option("--k", k, "curvature power k > 1");
  solve->add_option("--epsilon", epsilon, "target regularization parameter");
  solve->add_option("--mesh-h", mesh_h, "target mesh size (config key mesh.h)");
  solve->add_option("--schedule", schedule, "continuation schedule, decreasing")->delimiter(',');
  solve->add_option("--mode", mode, "newton | frozen");
  solve->add_option("--tol", tol, "max-norm residual tolerance");
  solve->add_option("--max-iter", max_iter, "iteration cap per stage");
  solve->add_option("--mu", mu, "H^{1,mu} exponent for diagnostics");
  solve->add_flag("--coupled", coupled, "derive the mesh size from h = c eps^beta");
  solve->add_option("--beta", beta, "coupling exponent");
  solve->add_option("--c-coupling", c_coupling, "coupling constant");
  solve->add_option("--delta", delta, "ball-radius exponent");
  solve->add_option("--gamma-ball", gamma_ball, "ball-radius epsilon exponent");
  solve->add_flag("--oracle-ref", oracle_ref, "report the H^{1,mu} distance to the radial oracle");
  solve->add_option("--output,-o", output, "report CSV path (default stdout)");
  solve->add_option("--dump-solution", dump_solution, "write the solution (pmcf-fun v1)");
  solve->add_option("--dump-mesh", dump_mesh, "write the mesh (pmcf-mesh v1)");
  solve->add_option("--dump-matrix", dump_matrix, "write the final linearization as triplets");
  SchemaFlag::add(solve, "one row per continuation stage:\n" + solve_report_csv_header() + "\n");

  // --- converge-eps ---
  auto* ceps = app.add_subcommand("converge-eps",
                                  "regularization-error study against the disk arrival time");
  double ce_k = 2.0, ce_theta = 0.25, ce_R = 1.0, ce_tol = 1e-10;
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  std::string ce_output = "-";
  ceps->add_option("--k", ce_k, "curvature power");
  ceps->add_option("--theta", ce_theta, "Hoelder exponent (0 gives the C0 column only)");
  ceps->add_option("--eps-list", eps_list, "epsilon values")->delimiter(',');
  ceps->add_option("--R", ce_R, "disk radius");
  ceps->add_option("--tol", ce_tol, "1D oracle tolerance");
  ceps->add_option("--output,-o", ce_output, "CSV path (default stdout)");
  SchemaFlag::add(ceps,
                  "epsilon,c0_error[,c0theta_error]\n"
                  "footer comments: fitted_c0_slope, fitted_c0theta_slope, predicted_min_rs, "
                  "predicted_lambda, slopes_meet_prediction\n");

  // --- converge-h ---
  auto* ch = app.add_subcommand("converge-h", "h-refinement study against the radial oracle");
  double ch_k = 2.0, ch_eps = 0.25, ch_mu = 3.0, ch_R = 1.0, ch_tol = 1e-10;
  std::vector<double> h_list{0.2, 0.1, 0.05};
  std::string ch_output = "-";
  ch->add_option("--k", ch_k, "curvature power");
  ch->add_option("--epsilon", ch_eps, "fixed regularization parameter");
  ch->add_option("--h-list", h_list, "mesh sizes, decreasing")->delimiter(',');
  ch->add_option("--mu", ch_mu, "H^{1,mu} exponent");
  ch->add_option("--R", ch_R, "disk radius");
  ch->add_option("--tol", ch_tol, "nonlinear solver tolerance");
  ch->add_option("--output,-o", ch_output, "CSV path (default stdout)");
  SchemaFlag::add(ch, "h,h1mu_error,c0_error,iterations\n"
                      "footer comments: fitted_h1mu_slope, fitted_c0_slope\n");

  // --- converge-coupled ---
  auto* cc = app.add_subcommand("converge-coupled",
                                "coupled eps-h study against the exact disk solution");
  double cc_k = 2.0, cc_theta = 0.25, cc_R = 1.0, cc_tol = 1e-10;
  double cc_beta = 2.0, cc_c = 1.25, cc_delta = 1.1, cc_gamma = 0.5, cc_mu = 3.0;
  std::vector<double> cc_schedule{0.4, 0.2, 0.1};
  std::string cc_output = "-";
  cc->add_option("--k", cc_k, "curvature power");
  cc->add_option("--theta", cc_theta, "Hoelder exponent, below 1/2");
  cc->add_option("--beta", cc_beta, "coupling exponent");
  cc->add_option("--c-coupling", cc_c, "coupling constant");
  cc->add_option("--delta", cc_delta, "ball-radius exponent");
  cc->add_option("--gamma-ball", cc_gamma, "ball-radius epsilon exponent");
  cc->add_option("--mu", cc_mu, "H^{1,mu} exponent");
  cc->add_option("--schedule", cc_schedule, "epsilon schedule, decreasing")->delimiter(',');
  cc->add_option("--R", cc_R, "disk radius");
  cc->add_option("--tol", cc_tol, "nonlinear solver tolerance");
  cc->add_option("--output,-o", cc_output, "CSV path (default stdout)");
  SchemaFlag::add(cc, "epsilon,h,c0_error,c0theta_error\n"
                      "footer comments: fitted_total_slope, predicted_lambda, "
                      "monotone_decreasing, slope_meets_prediction\n");

  // --- rates ---
  auto* rates = app.add_subcommand("rates", "explicit convergence-rate exponents");
  double rt_k = 2.0, rt_gamma_max = 7.0, rt_margin = 1e-3;
  std::vector<double> theta_list{0.25};
  bool rt_csv = false;
  std::string rt_output = "-";
  rates->add_option("--k", rt_k, "curvature power");
  rates->add_option("--gamma-max", rt_gamma_max, "gamma truncation for the supremum search");
  rates->add_option("--margin", rt_margin, "strict-inequality backoff margin");
  rates->add_option("--theta-list", theta_list, "Hoelder exponents for lambda")->delimiter(',');
  rates->add_flag("--csv", rt_csv, "emit CSV instead of the aligned table");
  rates->add_option("--output,-o", rt_output, "output path (default stdout)");
  SchemaFlag::add(rates, "k,gamma,alpha,s,r,beta1,beta2,margin1,margin2,margin3,boundary"
                         "[,lambda_<theta>...]\n");

  // --- oracle ---
  auto* orc = app.add_subcommand("oracle", "radial regularized profile on the disk");
  double or_k = 2.0, or_eps = 0.25, or_R = 1.0, or_tol = 1e-10;
  int or_grid = 256;
  std::string or_output = "-";
  orc->add_option("--k", or_k, "curvature power");
  orc->add_option("--epsilon", or_eps, "regularization parameter");
  orc->add_option("--R", or_R, "disk radius");
  orc->add_option("--grid-n", or_grid, "initial grid resolution (>= 64)");
  orc->add_option("--tol", or_tol, "Richardson error target (<= 1e-8)");
  orc->add_option("--output,-o", or_output, "CSV path (default stdout)");
  SchemaFlag::add(orc, "r,v\n");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return run_solve(solve, cfg, domain_name, R, a, b, k, epsilon, mesh_h, schedule, mode, tol,
                       max_iter, mu, coupled, beta, c_coupling, delta, gamma_ball, oracle_ref,
                       output, dump_solution, dump_mesh, dump_matrix);

    if (ceps->parsed()) {
      cfg.fill(ceps, "--k", "k", ce_k);
      cfg.fill(ceps, "--theta", "theta", ce_theta);
      cfg.fill(ceps, "--eps-list", "eps_list", eps_list);
      cfg.fill(ceps, "--R", "R", ce_R);
      cfg.fill(ceps, "--tol", "tol", ce_tol);
      cfg.fill(ceps, "--output", "output", ce_output);
      const EpsStudy study = run_epsilon_study(ce_k, ce_theta, eps_list, ce_R, ce_tol);
      Output out(ce_output);
      write_eps_study_csv(out.stream(), study);
      return 0;
    }

    if (ch->parsed()) {
      cfg.fill(ch, "--k", "k", ch_k);
      cfg.fill(ch, "--epsilon", "epsilon", ch_eps);
      cfg.fill(ch, "--h-list", "h_list", h_list);
      cfg.fill(ch, "--mu", "mu", ch_mu);
      cfg.fill(ch, "--R", "R", ch_R);
      cfg.fill(ch, "--tol", "tol", ch_tol);
      cfg.fill(ch, "--output", "output", ch_output);
      const HStudy study = run_h_study(ch_k, ch_eps, h_list, ch_mu, ch_R, ch_tol);
      Output out(ch_output);
      write_h_study_csv(out.stream(), study);
      return 0;
    }

    if (cc->parsed()) {
      cfg.fill(cc, "--k", "k", cc_k);
      cfg.fill(cc, "--theta", "theta", cc_theta);
      cfg.fill(cc, "--beta", "beta", cc_beta);
      cfg.fill(cc, "--c-coupling", "c_coupling", cc_c);
      cfg.fill(cc, "--delta", "delta", cc_delta);
      cfg.fill(cc, "--gamma-ball", "gamma_ball", cc_gamma);
      cfg.fill(cc, "--mu", "mu", cc_mu);
      cfg.fill(cc, "--schedule", "schedule", cc_schedule);
      cfg.fill(cc, "--R", "R", cc_R);
      cfg.fill(cc, "--tol", "tol", cc_tol);
      cfg.fill(cc, "--output", "output", cc_output);
      CouplingParams cp;
      cp.beta = cc_beta;
      cp.c_coupling = cc_c;
      cp.delta = cc_delta;
      cp.gamma_ball = cc_gamma;
      cp.mu = cc_mu;
      const CoupledStudy study = run_coupled_study(cc_k, cc_theta, cp, cc_schedule, cc_R, cc_tol);
      Output out(cc_output);
      write_coupled_study_csv(out.stream(), study);
      return 0;
    }

    if (rates->parsed()) {
      cfg.fill(rates, "--k", "k", rt_k);
      cfg.fill(rates, "--gamma-max", "gamma_max", rt_gamma_max);
      cfg.fill(rates, "--margin", "margin", rt_margin);
      cfg.fill(rates, "--theta-list", "theta_list", theta_list);
      cfg.fill(rates, "--output", "output", rt_output);
      const RateExponents re = optimize_rate(rt_k, rt_gamma_max, rt_margin);
      Output out(rt_output);
      std::ostream& os = out.stream();
      if (rt_csv) {
        os << "k,gamma,alpha,s,r,beta1,beta2,margin1,margin2,margin3,boundary";
        for (double th : theta_list) os << ",lambda_" << format_double(th);
        os << "\n";
        os << format_double(re.k) << "," << format_double(re.gamma) << ","
           << format_double(re.alpha) << "," << format_double(re.s) << ","
           << format_double(re.r) << "," << format_double(re.beta1) << ","
           << format_double(re.beta2) << "," << format_double(re.feasibility_margins[0]) << ","
           << format_double(re.feasibility_margins[1]) << ","
           << format_double(re.feasibility_margins[2]) << "," << (re.at_gamma_boundary ? 1 : 0);
        for (double th : theta_list) os << "," << format_double(re.lambda(th));
        os << "\n";
      } else {
        os << "k       = " << format_double(re.k) << "\n";
        os << "gamma   = " << format_double(re.gamma)
           << (re.at_gamma_boundary ? "  (objective maximized at gamma_max)" : "") << "\n";
        os << "alpha   = " << format_double(re.alpha) << "\n";
        os << "s       = " << format_double(re.s) << "\n";
        os << "r       = " << format_double(re.r) << "\n";
        os << "beta1   = " << format_double(re.beta1) << "\n";
        os << "beta2   = " << format_double(re.beta2) << "\n";
        os << "margins = " << format_double(re.feasibility_margins[0]) << ", "
           << format_double(re.feasibility_margins[1]) << ", "
           << format_double(re.feasibility_margins[2]) << "\n";
        for (double th : theta_list)
          os << "lambda(" << format_double(th) << ") = " << format_double(re.lambda(th)) << "\n";
      }
      return 0;
    }

    if (orc->parsed()) {
      cfg.fill(orc, "--k", "k", or_k);
      cfg.fill(orc, "--epsilon", "epsilon", or_eps);
      cfg.fill(orc, "--R", "R", or_R);
      cfg.fill(orc, "--grid-n", "grid_n", or_grid);
      cfg.fill(orc, "--tol", "tol", or_tol);
      cfg.fill(orc, "--output", "output", or_output);
      RegParams rp{or_eps, or_k};
      const RadialProfile prof = radial_regularized_solve(rp, or_R, or_grid, or_tol);
      Output out(or_output);
      write_profile_csv(out.stream(), prof);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
