#pragma once

#include "pmcf/geometry.hpp"
#include "pmcf/operators.hpp"

#include <iosfwd>
#include <vector>

namespace pmcf {

/// Arrival time of the disk shrinking under curvature^k flow:
/// u(x) = (R^{k+1} - |x|^{k+1}) / (k+1).
double exact_disk_arrival_time(double k, double R, const Vec2& x);

/// High-accuracy 1D solution of the radially reduced regularized equation
///   (1/r) (r v' / sqrt(eps^2 + v'^2))' = -(eps^2 + v'^2)^(-1/2k),
///   v'(0) = 0, v(R) = 0,
/// on a uniform grid. Deliberately independent of the FE machinery: finite
/// volumes, damped Newton on a tridiagonal system, grid doubling until the
/// Richardson error estimate drops below tol.
struct RadialProfile {
  std::vector<double> radii;  // 0 = r_0 < ... < r_n = R
  std::vector<double> values; // v(r_i); values.back() == 0
  RegParams rp;
  double solver_tol = 0.0;    // Richardson estimate of the max-norm error
  double radius() const { return radii.back(); }

  /// Local cubic interpolation (4-point Lagrange on the uniform grid).
  double value(double r) const;
  double derivative(double r) const;
};

RadialProfile radial_regularized_solve(const RegParams& rp, double R, int grid_n, double tol);

/// v(|p|) with the profile's interpolation accuracy.
std::function<double(const Vec2&)> radial_to_2d(const RadialProfile& profile);
/// Gradient v'(|p|) p/|p| (zero at the origin).
std::function<Vec2(const Vec2&)> radial_gradient_2d(const RadialProfile& profile);

void write_profile_csv(std::ostream& os, const RadialProfile& profile);

} // namespace pmcf
