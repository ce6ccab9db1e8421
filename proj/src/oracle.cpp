#include "pmcf/oracle.hpp"

#include "pmcf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace pmcf {

double exact_disk_arrival_time(double k, double R, const Vec2& x) {
  if (!(k > 1.0)) throw std::invalid_argument("exact_disk_arrival_time: k > 1 required");
  const double r = x.norm();
  if (r > R * (1.0 + 1e-9)) throw std::invalid_argument("exact_disk_arrival_time: |x| > R");
  const double rc = std::min(r, R);
  return (std::pow(R, k + 1.0) - std::pow(rc, k + 1.0)) / (k + 1.0);
}

namespace {

struct Tridiag {
  std::vector<double> lo, di, up; // lo[i] = J[i][i-1], up[i] = J[i][i+1]
};

double flux_q(double w, double eps) { return w / std::sqrt(eps * eps + w * w); }
double flux_dq(double w, double eps) {
  const double s = std::sqrt(eps * eps + w * w);
  return eps * eps / (s * s * s);
}
double src_g(double w, double eps, double k) {
  return std::pow(eps * eps + w * w, -1.0 / (2.0 * k));
}
double src_dg(double w, double eps, double k) {
  return (-1.0 / k) * w * std::pow(eps * eps + w * w, -1.0 / (2.0 * k) - 1.0);
}

// Finite-volume residual over cells [r_{i-1/2}, r_{i+1/2}] with unknowns
// v_0..v_{N-1} and v_N = 0; source term uses the mean of the face values.
void fv_residual(const std::vector<double>& v, double R, double eps, double k,
                 std::vector<double>& res, Tridiag* J) {
  const int N = static_cast<int>(v.size());
  const double dr = R / N;
  res.assign(N, 0.0);
  if (J) {
    J->lo.assign(N, 0.0);
    J->di.assign(N, 0.0);
    J->up.assign(N, 0.0);
  }
  std::vector<double> w(N), rf(N);
  for (int i = 0; i < N; ++i) {
    const double vr = (i + 1 < N) ? v[i + 1] : 0.0;
    w[i] = (vr - v[i]) / dr;
    rf[i] = (i + 0.5) * dr;
  }
  for (int i = 0; i < N; ++i) {
    const double A = (i == 0) ? rf[0] * rf[0] / 2.0 : (rf[i] * rf[i] - rf[i - 1] * rf[i - 1]) / 2.0;
    const double gl = (i == 0) ? src_g(0.0, eps, k) : src_g(w[i - 1], eps, k);
    const double gr = src_g(w[i], eps, k);
    const double Fl = (i == 0) ? 0.0 : rf[i - 1] * flux_q(w[i - 1], eps);
    const double Fr = rf[i] * flux_q(w[i], eps);
    res[i] = Fr - Fl + 0.5 * (gl + gr) * A;
    if (!J) continue;
    const double dFr = rf[i] * flux_dq(w[i], eps) / dr;
    const double dgr = src_dg(w[i], eps, k) / dr;
    J->di[i] += -dFr - 0.5 * dgr * A;
    if (i + 1 < N) J->up[i] += dFr + 0.5 * dgr * A;
    if (i > 0) {
      const double dFl = rf[i - 1] * flux_dq(w[i - 1], eps) / dr;
      const double dgl = src_dg(w[i - 1], eps, k) / dr;
      J->lo[i] += dFl - 0.5 * dgl * A;
      J->di[i] += -dFl + 0.5 * dgl * A;
    }
  }
}

void thomas_solve(const Tridiag& J, std::vector<double>& rhs) {
  const int N = static_cast<int>(rhs.size());
  std::vector<double> c(N, 0.0);
  double piv = J.di[0];
  if (std::abs(piv) < 1e-300) throw std::runtime_error("radial solve: singular Jacobian");
  c[0] = J.up[0] / piv;
  rhs[0] /= piv;
  for (int i = 1; i < N; ++i) {
    piv = J.di[i] - J.lo[i] * c[i - 1];
    if (std::abs(piv) < 1e-300) throw std::runtime_error("radial solve: singular Jacobian");
    c[i] = J.up[i] / piv;
    rhs[i] = (rhs[i] - J.lo[i] * rhs[i - 1]) / piv;
  }
  for (int i = N - 2; i >= 0; --i) rhs[i] -= c[i] * rhs[i + 1];
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool newton_stage(std::vector<double>& v, double R, double eps, double k, double tol) {
  const int N = static_cast<int>(v.size());
  std::vector<double> res, trial_res, d;
  Tridiag J;
  for (int it = 0; it < 80; ++it) {
    fv_residual(v, R, eps, k, res, &J);
    const double nr = max_abs(res);
    if (nr <= tol) return true;
    d = res;
    thomas_solve(J, d);
    double s = 1.0;
    bool improved = false;
    std::vector<double> trial(N);
    for (int half = 0; half < 20; ++half) {
      for (int i = 0; i < N; ++i) trial[i] = v[i] - s * d[i];
      fv_residual(trial, R, eps, k, trial_res, nullptr);
      if (max_abs(trial_res) < nr) {
        improved = true;
        break;
      }
      s *= 0.5;
    }
    if (!improved) return nr <= 1e-9; // roundoff stall
    v = trial;
  }
  return false;
}

std::vector<double> solve_on_grid(const RegParams& rp, double R, int N) {
  const double dr = R / N;
  std::vector<double> v(N);
  double e = std::max(rp.epsilon, 2.0);
  for (int i = 0; i < N; ++i) {
    const double r = i * dr;
    v[i] = std::pow(e, 1.0 - 1.0 / rp.k) * (R * R - r * r) / 4.0;
  }
  const double newton_tol = 1e-12 * std::max(1.0, static_cast<double>(N) / 1024.0);
  for (;;) {
    if (!newton_stage(v, R, e, rp.k, newton_tol))
      throw std::runtime_error("radial solve: Newton continuation failed");
    if (e <= rp.epsilon * (1.0 + 1e-12)) break;
    e = std::max(rp.epsilon, e / 2.0);
  }
  return v;
}

} // namespace

RadialProfile radial_regularized_solve(const RegParams& rp, double R, int grid_n, double tol) {
  rp.validate();
  if (grid_n < 64) throw std::invalid_argument("radial solve: grid_n >= 64 required");
  if (!(tol > 0.0) || tol > 1e-8) throw std::invalid_argument("radial solve: tol in (0, 1e-8]");
  if (!(R > 0.0)) throw std::invalid_argument("radial solve: R > 0 required");

  int N = grid_n;
  std::vector<double> coarse = solve_on_grid(rp, R, N);
  double est = 1e300;
  std::vector<double> fine;
  const int n_max = 1 << 21;
  while (true) {
    fine = solve_on_grid(rp, R, 2 * N);
    double diff = 0.0;
    for (int i = 0; i < N; ++i) diff = std::max(diff, std::abs(fine[2 * i] - coarse[i]));
    est = diff / 3.0; // second-order scheme
    if (est <= tol) break;
    N *= 2;
    if (2 * N > n_max) throw std::runtime_error("radial solve: grid cap reached before tol");
    coarse = std::move(fine);
  }
  RadialProfile prof;
  prof.rp = rp;
  prof.solver_tol = est;
  const int nf = 2 * N;
  prof.radii.resize(nf + 1);
  prof.values.resize(nf + 1);
  for (int i = 0; i < nf; ++i) {
    prof.radii[i] = R * i / nf;
    prof.values[i] = fine[i];
  }
  prof.radii[nf] = R;
  prof.values[nf] = 0.0;
  return prof;
}

double RadialProfile::value(double r) const {
  const double R = radii.back();
  if (r < 0.0 || r > R * (1.0 + 1e-9)) throw std::invalid_argument("profile: r outside [0, R]");
  r = std::min(r, R);
  const int n = static_cast<int>(radii.size()) - 1;
  const double dr = R / n;
  int i = std::clamp(static_cast<int>(r / dr), 0, n - 1);
  int i0 = std::clamp(i - 1, 0, n - 3);
  const double t = (r - radii[i0]) / dr; // in [0,3] across the 4-point stencil
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    double L = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) L *= (t - b) / (a - b);
    acc += values[i0 + a] * L;
  }
  return acc;
}

double RadialProfile::derivative(double r) const {
  const double R = radii.back();
  if (r < 0.0 || r > R * (1.0 + 1e-9)) throw std::invalid_argument("profile: r outside [0, R]");
  r = std::min(r, R);
  const int n = static_cast<int>(radii.size()) - 1;
  const double dr = R / n;
  int i = std::clamp(static_cast<int>(r / dr), 0, n - 1);
  int i0 = std::clamp(i - 1, 0, n - 3);
  const double t = (r - radii[i0]) / dr;
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    double dL = 0.0;
    for (int c = 0; c < 4; ++c) {
      if (c == a) continue;
      double term = 1.0 / (a - c);
      for (int b = 0; b < 4; ++b)
        if (b != a && b != c) term *= (t - b) / (a - b);
      dL += term;
    }
    acc += values[i0 + a] * dL;
  }
  return acc / dr;
}

std::function<double(const Vec2&)> radial_to_2d(const RadialProfile& profile) {
  return [profile](const Vec2& p) { return profile.value(p.norm()); };
}

std::function<Vec2(const Vec2&)> radial_gradient_2d(const RadialProfile& profile) {
  return [profile](const Vec2& p) -> Vec2 {
    const double r = p.norm();
    if (r < 1e-14) return Vec2::Zero();
    return profile.derivative(r) * (p / r);
  };
}

void write_profile_csv(std::ostream& os, const RadialProfile& profile) {
  os << "r,v\n";
  for (std::size_t i = 0; i < profile.radii.size(); ++i)
    os << format_double(profile.radii[i]) << "," << format_double(profile.values[i]) << "\n";
}

} // namespace pmcf
