#include "pmcf/experiments.hpp"

#include "pmcf/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace pmcf;

TEST_CASE("eoc basics") {
  CHECK(eoc({1.0, 0.25}, {1.0, 0.5})[0] == doctest::Approx(2.0));
  CHECK(eoc({1.0, 1.0}, {1.0, 0.5})[0] == doctest::Approx(0.0));
  // synthetic e = s^1.5 over four steps
  std::vector<double> steps{1.0, 0.5, 0.25, 0.125}, errs;
  for (double s : steps) errs.push_back(std::pow(s, 1.5));
  for (double r : eoc(errs, steps)) CHECK(r == doctest::Approx(1.5).epsilon(1e-12));
  CHECK_THROWS(eoc({1.0}, {1.0}));
  CHECK_THROWS(eoc({1.0, -1.0}, {1.0, 0.5}));
  CHECK_THROWS(eoc({1.0, 0.5}, {0.5, 1.0}));
}

TEST_CASE("loglog slope fit recovers synthetic exponents") {
  std::vector<double> steps{0.4, 0.2, 0.1, 0.05}, errs;
  for (double s : steps) errs.push_back(3.0 * std::pow(s, 1.17));
  const SlopeFit fit = fit_loglog_slope(steps, errs);
  CHECK(fit.slope == doctest::Approx(1.17).epsilon(1e-12));
  CHECK(fit.residual <= 1e-12);
}

TEST_CASE("epsilon study: monotone errors and slopes above the guaranteed rate") {
  const EpsStudy study = run_epsilon_study(2.0, 0.25, {0.2, 0.1, 0.05, 0.025});
  REQUIRE(study.rows.size() == 4);
  for (std::size_t i = 0; i + 1 < study.rows.size(); ++i) {
    CHECK(study.rows[i + 1].c0_error < study.rows[i].c0_error);
    CHECK(study.rows[i + 1].holder_error < study.rows[i].holder_error);
  }
  CHECK(study.predicted_min_rs == doctest::Approx(0.154).epsilon(1e-2));
  CHECK(study.c0_fit.slope >= study.predicted_min_rs);
  CHECK(study.holder_fit.slope >= 0.75 * study.predicted_min_rs);
  CHECK(study.slopes_meet_prediction);
}

TEST_CASE("epsilon study: single row and theta zero") {
  const EpsStudy one = run_epsilon_study(2.0, 0.25, {0.1});
  CHECK(one.rows.size() == 1);
  CHECK(one.c0_fit.slope == 0.0); // no fit on a single row
  const EpsStudy c0only = run_epsilon_study(2.0, 0.0, {0.2, 0.1});
  for (const auto& row : c0only.rows) CHECK(row.holder_error == row.c0_error);
}

TEST_CASE("error split bookkeeping: triangle inequality row-wise") {
  // || u - u_eps_h ||_C0 <= || u - u_eps ||_C0 + || u_eps - u_eps_h ||_C0,
  // each term measured from the respective oracle.
  const double k = 2.0, eps = 0.25;
  RegParams rp{eps, k};
  const RadialProfile prof = radial_regularized_solve(rp, 1.0, 256, 1e-10);
  const auto sp = make_p2_space(build_mesh(DomainGeometry::disk(1.0), 0.15));
  const FeFunction init = boundary_correct(interpolate(sp, radial_to_2d(prof)));
  auto [w, rep] = solve_regularized(init, rp, {});
  auto exact = [&](const Vec2& p) { return exact_disk_arrival_time(k, 1.0, p); };

  const auto diff_total = sample_difference(w, exact, 1);
  const auto diff_fe = sample_difference(w, radial_to_2d(prof), 1);
  const double total = c0_of_samples(diff_total);
  const double fe_part = c0_of_samples(diff_fe);
  double eps_part = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double r = i / 2000.0;
    eps_part = std::max(eps_part, std::abs(prof.value(r) - exact(Vec2(r, 0))));
  }
  CHECK(total <= eps_part + fe_part + 1e-12);
}

TEST_CASE("h study on a coarse pair shows decreasing errors") {
  const HStudy study = run_h_study(2.0, 0.5, {0.3, 0.15}, 3.0);
  REQUIRE(study.rows.size() == 2);
  CHECK(study.rows[1].c0_error < study.rows[0].c0_error);
  CHECK(study.rows[1].h1mu_error < study.rows[0].h1mu_error);
  CHECK(study.c0_fit.slope >= 1.0);
}

TEST_CASE("coupled study: rows carry the coupled mesh size") {
  CouplingParams cp;
  cp.beta = 2.0;
  cp.c_coupling = 1.25;
  cp.delta = 1.1;
  cp.gamma_ball = 0.5;
  cp.mu = 3.0;
  const CoupledStudy study = run_coupled_study(2.0, 0.25, cp, {0.8, 0.566});
  REQUIRE(study.rows.size() == 2);
  CHECK(study.rows[0].h <= 1.2 * coupled_mesh_size(cp, 0.8));
  CHECK(study.rows[1].h <= 1.2 * coupled_mesh_size(cp, 0.566));
  const CoupledStudy empty = run_coupled_study(2.0, 0.25, cp, {});
  CHECK(empty.rows.empty());
}

TEST_CASE("study CSV output is deterministic") {
  const EpsStudy study = run_epsilon_study(2.0, 0.25, {0.4, 0.2});
  std::ostringstream a, b;
  write_eps_study_csv(a, study);
  const EpsStudy study2 = run_epsilon_study(2.0, 0.25, {0.4, 0.2});
  write_eps_study_csv(b, study2);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("epsilon,c0_error,c0theta_error") == 0);
}
