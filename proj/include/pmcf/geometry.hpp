#pragma once

#include <Eigen/Core>

#include <functional>
#include <string>

namespace pmcf {

using Vec2 = Eigen::Vector2d;

/// Smooth bounded domain described by its signed distance function.
/// Sign convention: negative inside, zero on the boundary, positive outside.
class DomainGeometry {
public:
  enum class Kind { Disk, Ellipse, Custom };

  static DomainGeometry disk(double radius);
  static DomainGeometry ellipse(double semi_axis_a, double semi_axis_b);
  static DomainGeometry custom(std::function<double(const Vec2&)> signed_distance,
                               std::function<Vec2(const Vec2&)> boundary_projection,
                               double diameter, double min_curvature_radius,
                               std::string name = "custom");

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double semi_axis_a() const { return a_; }
  double semi_axis_b() const { return b_; }

  double signed_distance(const Vec2& p) const;
  Vec2 boundary_projection(const Vec2& p) const;

  double diameter() const { return diameter_; }
  double min_curvature_radius() const { return min_curv_radius_; }

private:
  DomainGeometry() = default;

  Kind kind_ = Kind::Disk;
  std::string name_;
  double a_ = 1.0, b_ = 1.0;
  double diameter_ = 2.0;
  double min_curv_radius_ = 1.0;
  std::function<double(const Vec2&)> sdf_;
  std::function<Vec2(const Vec2&)> projection_;
};

/// Closest point on the ellipse x^2/a^2 + y^2/b^2 = 1 to p, a >= b > 0.
Vec2 closest_point_on_ellipse(double a, double b, const Vec2& p);

} // namespace pmcf
