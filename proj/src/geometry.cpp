#include "pmcf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace pmcf {

namespace {

// Robust closest-point search in the first quadrant, axes u >= 0, v >= 0.
// Solves F(t) = (a*u/(t+a^2))^2 + (b*v/(t+b^2))^2 - 1 = 0 by bisection;
// F is strictly decreasing on (-b^2, inf) when v > 0.
Vec2 closest_first_quadrant(double a, double b, double u, double v) {
  const double tiny = 1e-14 * a;
  if (v <= tiny) {
    // Point on the major axis. Off-axis foot exists inside the evolute.
    const double num = a * a - b * b;
    if (num > 0.0 && u < num / a) {
      const double x = a * a * u / num;
      const double y = b * std::sqrt(std::max(0.0, 1.0 - (x / a) * (x / a)));
      return {x, y};
    }
    return {a, 0.0};
  }
  if (u <= tiny) {
    const double num = a * a - b * b;
    if (num > 0.0 && v < num / b) {
      const double y = b * b * v / num;
      const double x = a * std::sqrt(std::max(0.0, 1.0 - (y / b) * (y / b)));
      return {x, y};
    }
    return {0.0, b};
  }
  auto F = [&](double t) {
    const double ra = a * u / (t + a * a);
    const double rb = b * v / (t + b * b);
    return ra * ra + rb * rb - 1.0;
  };
  double lo = -b * b + b * v; // F(lo) >= 0
  double hi = std::max(a * u, b * v) + a * a;
  while (F(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (F(mid) > 0.0 ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  return {a * a * u / (t + a * a), b * b * v / (t + b * b)};
}

} // namespace

Vec2 closest_point_on_ellipse(double a, double b, const Vec2& p) {
  Vec2 q = closest_first_quadrant(a, b, std::abs(p.x()), std::abs(p.y()));
  if (p.x() < 0.0) q.x() = -q.x();
  if (p.y() < 0.0) q.y() = -q.y();
  return q;
}

DomainGeometry DomainGeometry::disk(double radius) {
  if (radius <= 0.0) throw std::invalid_argument("disk radius must be positive");
  DomainGeometry g;
  g.kind_ = Kind::Disk;
  g.name_ = "disk";
  g.a_ = g.b_ = radius;
  g.diameter_ = 2.0 * radius;
  g.min_curv_radius_ = radius;
  return g;
}

DomainGeometry DomainGeometry::ellipse(double semi_axis_a, double semi_axis_b) {
  if (semi_axis_a <= 0.0 || semi_axis_b <= 0.0)
    throw std::invalid_argument("ellipse semi-axes must be positive");
  DomainGeometry g;
  g.kind_ = Kind::Ellipse;
  g.name_ = "ellipse";
  g.a_ = semi_axis_a;
  g.b_ = semi_axis_b;
  const double amax = std::max(semi_axis_a, semi_axis_b);
  const double amin = std::min(semi_axis_a, semi_axis_b);
  g.diameter_ = 2.0 * amax;
  g.min_curv_radius_ = amin * amin / amax;
  return g;
}

DomainGeometry DomainGeometry::custom(std::function<double(const Vec2&)> signed_distance,
                                      std::function<Vec2(const Vec2&)> boundary_projection,
                                      double diameter, double min_curvature_radius,
                                      std::string name) {
  if (!signed_distance || !boundary_projection)
    throw std::invalid_argument("custom domain needs signed_distance and boundary_projection");
  DomainGeometry g;
  g.kind_ = Kind::Custom;
  g.name_ = std::move(name);
  g.diameter_ = diameter;
  g.min_curv_radius_ = min_curvature_radius;
  g.sdf_ = std::move(signed_distance);
  g.projection_ = std::move(boundary_projection);
  return g;
}

double DomainGeometry::signed_distance(const Vec2& p) const {
  switch (kind_) {
    case Kind::Disk:
      return p.norm() - a_;
    case Kind::Ellipse: {
      const Vec2 q = closest_point_on_ellipse(std::max(a_, b_), std::min(a_, b_),
                                              a_ >= b_ ? p : Vec2(p.y(), p.x()));
      const Vec2 qp = a_ >= b_ ? q : Vec2(q.y(), q.x());
      const double d = (p - qp).norm();
      const double inside = (p.x() * p.x()) / (a_ * a_) + (p.y() * p.y()) / (b_ * b_);
      return inside < 1.0 ? -d : d;
    }
    case Kind::Custom:
      return sdf_(p);
  }
  throw std::logic_error("unreachable");
}

Vec2 DomainGeometry::boundary_projection(const Vec2& p) const {
  switch (kind_) {
    case Kind::Disk: {
      const double n = p.norm();
      if (n < 1e-300) return {a_, 0.0};
      return p * (a_ / n);
    }
    case Kind::Ellipse: {
      if (a_ >= b_) return closest_point_on_ellipse(a_, b_, p);
      const Vec2 q = closest_point_on_ellipse(b_, a_, Vec2(p.y(), p.x()));
      return {q.y(), q.x()};
    }
    case Kind::Custom:
      return projection_(p);
  }
  throw std::logic_error("unreachable");
}

} // namespace pmcf
