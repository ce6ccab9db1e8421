#pragma once

#include "pmcf/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace pmcf {

/// 7-point symmetric triangle rule, exact for degree 5. One shared rule is
/// used for assembly and all integral norms.
struct TriQuadrature {
  static constexpr int n_points = 7;
  std::array<std::array<double, 3>, n_points> bary;
  std::array<double, n_points> weights; // sum to 1, scale by triangle area
  static const TriQuadrature& get();
};

/// P2 shape functions on the reference triangle, local dof order
/// [v0 v1 v2 e01 e12 e20].
void p2_shape(const std::array<double, 3>& lambda, std::array<double, 6>& N);
void p2_shape_grad(const std::array<double, 3>& lambda, const std::array<Vec2, 3>& grad_lambda,
                   std::array<Vec2, 6>& dN);

/// Quadratic Lagrange space on a TriMesh: dofs at vertices then edge
/// midpoints (the node set N_h).
class P2Space {
public:
  explicit P2Space(std::shared_ptr<const TriMesh> mesh);

  const TriMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const TriMesh> mesh_ptr() const { return mesh_; }
  const EdgeTable& edge_table() const { return edges_; }

  int n_vertices() const { return mesh_->n_vertices(); }
  int n_edges() const { return static_cast<int>(edges_.edges.size()); }
  int n_dofs() const { return n_vertices() + n_edges(); }

  const std::vector<Vec2>& dof_points() const { return dof_points_; }
  const std::vector<std::uint8_t>& dof_on_boundary() const { return dof_on_boundary_; }
  const std::vector<int>& interior_dofs() const { return interior_dofs_; }
  const std::vector<int>& boundary_dofs() const { return boundary_dofs_; }
  /// Position of a dof in interior_dofs(), or -1 for boundary dofs.
  const std::vector<int>& interior_index() const { return interior_index_; }

  /// Global dofs of triangle t in local order [v0 v1 v2 e01 e12 e20].
  std::array<int, 6> cell_dofs(int t) const;

  double tri_area(int t) const { return tri_area_[t]; }
  const std::array<Vec2, 3>& tri_grad_lambda(int t) const { return tri_grad_lambda_[t]; }

  /// Triangle containing p, with barycentric coordinates. Tolerance is
  /// relative to the mesh size; returns nullopt if p is outside.
  std::optional<std::pair<int, std::array<double, 3>>> locate(const Vec2& p) const;
  /// Nearest triangle by clamped barycentric coordinates (never fails).
  std::pair<int, std::array<double, 3>> locate_clamped(const Vec2& p) const;

private:
  std::shared_ptr<const TriMesh> mesh_;
  EdgeTable edges_;
  std::vector<Vec2> dof_points_;
  std::vector<std::uint8_t> dof_on_boundary_;
  std::vector<int> interior_dofs_, boundary_dofs_, interior_index_;
  std::vector<double> tri_area_;
  std::vector<std::array<Vec2, 3>> tri_grad_lambda_;
  // uniform grid over the bounding box for point location
  Vec2 grid_lo_;
  double grid_cell_ = 1.0;
  int grid_nx_ = 1, grid_ny_ = 1;
  std::vector<std::vector<int>> grid_bins_;
  std::array<double, 3> barycentric(int t, const Vec2& p) const;
};

std::shared_ptr<const P2Space> make_p2_space(std::shared_ptr<const TriMesh> mesh);
std::shared_ptr<const P2Space> make_p2_space(TriMesh mesh);

/// Member of the P2 space (coefficient vector in dof order). Functions in
/// V_h additionally have zero boundary coefficients.
struct FeFunction {
  std::shared_ptr<const P2Space> space;
  Eigen::VectorXd coeffs;

  explicit FeFunction(std::shared_ptr<const P2Space> s)
      : space(std::move(s)), coeffs(Eigen::VectorXd::Zero(space->n_dofs())) {}
  FeFunction(std::shared_ptr<const P2Space> s, Eigen::VectorXd c)
      : space(std::move(s)), coeffs(std::move(c)) {}

  bool in_vh(double tol = 0.0) const;

  /// Value/gradient inside triangle t at barycentric coordinates lambda.
  double value_in_tri(int t, const std::array<double, 3>& lambda) const;
  Vec2 gradient_in_tri(int t, const std::array<double, 3>& lambda) const;
};

double evaluate(const FeFunction& f, const Vec2& p);
Vec2 evaluate_gradient(const FeFunction& f, const Vec2& p);

/// Nodal interpolation I_h: matches g at every dof point.
FeFunction interpolate(std::shared_ptr<const P2Space> space,
                       const std::function<double(const Vec2&)>& g);

/// Zeroes boundary coefficients (I_h u - z_h realized on coefficients);
/// interior coefficients are untouched and the result lies in V_h.
FeFunction boundary_correct(const FeFunction& f);

// --- norms ---

double norm_Lq(const FeFunction& f, double q);
double norm_H1mu(const FeFunction& f, double mu);

/// Deterministic sample set: all dof points plus a fixed per-triangle
/// refinement (level 0 = dofs only, 1 = +6 points/tri, 2 = +15 points/tri).
struct SampleSet {
  std::vector<Vec2> points;
  std::vector<double> values;
};
SampleSet sample_values(const FeFunction& f, int level = 1);
SampleSet sample_difference(const FeFunction& f,
                            const std::function<double(const Vec2&)>& g, int level = 1);

double c0_of_samples(const SampleSet& s);
/// Max difference quotient over sampled pairs, subsampled with a
/// deterministic stride to at most max_pairs pairs.
double holder_of_samples(const SampleSet& s, double theta,
                         std::int64_t max_pairs = 1000000);

double norm_C0(const FeFunction& f, int level = 1);
double holder_seminorm(const FeFunction& f, double theta, int level = 1,
                       std::int64_t max_pairs = 1000000);

/// Quadrature H^{1,mu} distance to a reference with known gradient.
double norm_H1mu_diff(const FeFunction& f, const std::function<double(const Vec2&)>& g,
                      const std::function<Vec2(const Vec2&)>& grad_g, double mu);

/// ASCII dump "pmcf-fun v1" carrying the mesh checksum.
void write_fe_function(std::ostream& os, const FeFunction& f);
FeFunction read_fe_function(std::istream& is, std::shared_ptr<const P2Space> space);

} // namespace pmcf
