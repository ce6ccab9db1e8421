#include "pmcf/fe_space.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace pmcf {

const TriQuadrature& TriQuadrature::get() {
  static const TriQuadrature rule = [] {
    TriQuadrature q;
    const double w0 = 9.0 / 40.0;
    const double wa = (155.0 + std::sqrt(15.0)) / 1200.0;
    const double wb = (155.0 - std::sqrt(15.0)) / 1200.0;
    const double a1 = (6.0 + std::sqrt(15.0)) / 21.0; // 0.4701...
    const double a2 = (6.0 - std::sqrt(15.0)) / 21.0; // 0.1012...
    q.bary[0] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    q.weights[0] = w0;
    const double c1 = 1.0 - 2.0 * a1;
    const double c2 = 1.0 - 2.0 * a2;
    q.bary[1] = {c1, a1, a1};
    q.bary[2] = {a1, c1, a1};
    q.bary[3] = {a1, a1, c1};
    q.weights[1] = q.weights[2] = q.weights[3] = wa;
    q.bary[4] = {c2, a2, a2};
    q.bary[5] = {a2, c2, a2};
    q.bary[6] = {a2, a2, c2};
    q.weights[4] = q.weights[5] = q.weights[6] = wb;
    return q;
  }();
  return rule;
}

void p2_shape(const std::array<double, 3>& l, std::array<double, 6>& N) {
  N[0] = l[0] * (2.0 * l[0] - 1.0);
  N[1] = l[1] * (2.0 * l[1] - 1.0);
  N[2] = l[2] * (2.0 * l[2] - 1.0);
  N[3] = 4.0 * l[0] * l[1];
  N[4] = 4.0 * l[1] * l[2];
  N[5] = 4.0 * l[2] * l[0];
}

void p2_shape_grad(const std::array<double, 3>& l, const std::array<Vec2, 3>& g,
                   std::array<Vec2, 6>& dN) {
  dN[0] = (4.0 * l[0] - 1.0) * g[0];
  dN[1] = (4.0 * l[1] - 1.0) * g[1];
  dN[2] = (4.0 * l[2] - 1.0) * g[2];
  dN[3] = 4.0 * (l[1] * g[0] + l[0] * g[1]);
  dN[4] = 4.0 * (l[2] * g[1] + l[1] * g[2]);
  dN[5] = 4.0 * (l[0] * g[2] + l[2] * g[0]);
}

P2Space::P2Space(std::shared_ptr<const TriMesh> mesh) : mesh_(std::move(mesh)) {
  const TriMesh& m = *mesh_;
  edges_ = build_edge_table(m);
  const int nv = m.n_vertices();
  const int ne = static_cast<int>(edges_.edges.size());

  dof_points_.resize(nv + ne);
  for (int v = 0; v < nv; ++v) dof_points_[v] = m.vertices[v];
  for (int e = 0; e < ne; ++e)
    dof_points_[nv + e] = 0.5 * (m.vertices[edges_.edges[e][0]] + m.vertices[edges_.edges[e][1]]);

  dof_on_boundary_.assign(nv + ne, 0);
  for (int v = 0; v < nv; ++v) dof_on_boundary_[v] = m.boundary_vertex[v];
  for (int e = 0; e < ne; ++e)
    if (edges_.incidence[e] == 1) dof_on_boundary_[nv + e] = 1;

  interior_index_.assign(nv + ne, -1);
  for (int d = 0; d < nv + ne; ++d) {
    if (dof_on_boundary_[d]) {
      boundary_dofs_.push_back(d);
    } else {
      interior_index_[d] = static_cast<int>(interior_dofs_.size());
      interior_dofs_.push_back(d);
    }
  }

  tri_area_.resize(m.n_triangles());
  tri_grad_lambda_.resize(m.n_triangles());
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    const Vec2 p0 = m.vertices[tri[0]], p1 = m.vertices[tri[1]], p2 = m.vertices[tri[2]];
    const double area = signed_area(p0, p1, p2);
    tri_area_[t] = area;
    Eigen::Matrix2d B;
    B.col(0) = p1 - p0;
    B.col(1) = p2 - p0;
    const Eigen::Matrix2d Binv = B.inverse();
    const Vec2 g1 = Binv.row(0), g2 = Binv.row(1);
    tri_grad_lambda_[t] = {Vec2(-g1 - g2), g1, g2};
  }

  // Point-location bins over the bounding box.
  Vec2 lo = m.vertices[0], hi = m.vertices[0];
  for (const auto& v : m.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  grid_lo_ = lo;
  grid_cell_ = std::max(m.mesh_size_h, 1e-12);
  grid_nx_ = std::max(1, static_cast<int>(std::ceil((hi.x() - lo.x()) / grid_cell_)));
  grid_ny_ = std::max(1, static_cast<int>(std::ceil((hi.y() - lo.y()) / grid_cell_)));
  grid_bins_.assign(static_cast<std::size_t>(grid_nx_) * grid_ny_, {});
  auto bin_of = [&](double x, double lo0, int n) {
    return std::clamp(static_cast<int>((x - lo0) / grid_cell_), 0, n - 1);
  };
  for (int t = 0; t < m.n_triangles(); ++t) {
    Vec2 tlo = m.vertices[m.triangles[t][0]], thi = tlo;
    for (int e = 1; e < 3; ++e) {
      tlo = tlo.cwiseMin(m.vertices[m.triangles[t][e]]);
      thi = thi.cwiseMax(m.vertices[m.triangles[t][e]]);
    }
    const int x0 = bin_of(tlo.x(), grid_lo_.x(), grid_nx_), x1 = bin_of(thi.x(), grid_lo_.x(), grid_nx_);
    const int y0 = bin_of(tlo.y(), grid_lo_.y(), grid_ny_), y1 = bin_of(thi.y(), grid_lo_.y(), grid_ny_);
    for (int gy = y0; gy <= y1; ++gy)
      for (int gx = x0; gx <= x1; ++gx)
        grid_bins_[static_cast<std::size_t>(gy) * grid_nx_ + gx].push_back(t);
  }
}

std::array<int, 6> P2Space::cell_dofs(int t) const {
  const auto& tri = mesh_->triangles[t];
  const auto& te = edges_.tri_edges[t];
  const int nv = n_vertices();
  return {tri[0], tri[1], tri[2], nv + te[0], nv + te[1], nv + te[2]};
}

std::array<double, 3> P2Space::barycentric(int t, const Vec2& p) const {
  const auto& g = tri_grad_lambda_[t];
  const Vec2 p0 = mesh_->vertices[mesh_->triangles[t][0]];
  const double l1 = g[1].dot(p - p0);
  const double l2 = g[2].dot(p - p0);
  return {1.0 - l1 - l2, l1, l2};
}

std::optional<std::pair<int, std::array<double, 3>>> P2Space::locate(const Vec2& p) const {
  const double tol = 1e-12;
  const int gx = std::clamp(static_cast<int>((p.x() - grid_lo_.x()) / grid_cell_), 0, grid_nx_ - 1);
  const int gy = std::clamp(static_cast<int>((p.y() - grid_lo_.y()) / grid_cell_), 0, grid_ny_ - 1);
  for (int dy = 0; dy <= 2; ++dy)
    for (int dx = 0; dx <= 2; ++dx) {
      const int bx = gx + (dx == 2 ? -1 : dx), by = gy + (dy == 2 ? -1 : dy);
      if (bx < 0 || bx >= grid_nx_ || by < 0 || by >= grid_ny_) continue;
      for (int t : grid_bins_[static_cast<std::size_t>(by) * grid_nx_ + bx]) {
        const auto l = barycentric(t, p);
        if (l[0] >= -tol && l[1] >= -tol && l[2] >= -tol) return std::make_pair(t, l);
      }
    }
  return std::nullopt;
}

std::pair<int, std::array<double, 3>> P2Space::locate_clamped(const Vec2& p) const {
  if (auto hit = locate(p)) return *hit;
  int best = 0;
  double best_score = -1e300;
  for (int t = 0; t < mesh_->n_triangles(); ++t) {
    const auto l = barycentric(t, p);
    const double score = std::min({l[0], l[1], l[2]});
    if (score > best_score) {
      best_score = score;
      best = t;
    }
  }
  auto l = barycentric(best, p);
  for (double& li : l) li = std::max(li, 0.0);
  const double s = l[0] + l[1] + l[2];
  for (double& li : l) li /= s;
  return {best, l};
}

std::shared_ptr<const P2Space> make_p2_space(std::shared_ptr<const TriMesh> mesh) {
  return std::make_shared<const P2Space>(std::move(mesh));
}
std::shared_ptr<const P2Space> make_p2_space(TriMesh mesh) {
  return make_p2_space(std::make_shared<const TriMesh>(std::move(mesh)));
}

bool FeFunction::in_vh(double tol) const {
  for (int d : space->boundary_dofs())
    if (std::abs(coeffs[d]) > tol) return false;
  return true;
}

double FeFunction::value_in_tri(int t, const std::array<double, 3>& lambda) const {
  std::array<double, 6> N;
  p2_shape(lambda, N);
  const auto dofs = space->cell_dofs(t);
  double v = 0.0;
  for (int i = 0; i < 6; ++i) v += coeffs[dofs[i]] * N[i];
  return v;
}

Vec2 FeFunction::gradient_in_tri(int t, const std::array<double, 3>& lambda) const {
  std::array<Vec2, 6> dN;
  p2_shape_grad(lambda, space->tri_grad_lambda(t), dN);
  const auto dofs = space->cell_dofs(t);
  Vec2 g = Vec2::Zero();
  for (int i = 0; i < 6; ++i) g += coeffs[dofs[i]] * dN[i];
  return g;
}

double evaluate(const FeFunction& f, const Vec2& p) {
  const auto hit = f.space->locate(p);
  if (!hit) throw std::runtime_error("evaluate: point outside mesh");
  return f.value_in_tri(hit->first, hit->second);
}

Vec2 evaluate_gradient(const FeFunction& f, const Vec2& p) {
  const auto hit = f.space->locate(p);
  if (!hit) throw std::runtime_error("evaluate_gradient: point outside mesh");
  return f.gradient_in_tri(hit->first, hit->second);
}

FeFunction interpolate(std::shared_ptr<const P2Space> space,
                       const std::function<double(const Vec2&)>& g) {
  FeFunction f(space);
  const auto& pts = space->dof_points();
  for (int d = 0; d < space->n_dofs(); ++d) f.coeffs[d] = g(pts[d]);
  return f;
}

FeFunction boundary_correct(const FeFunction& f) {
  FeFunction out = f;
  for (int d : f.space->boundary_dofs()) out.coeffs[d] = 0.0;
  return out;
}

double norm_Lq(const FeFunction& f, double q) {
  if (q < 1.0) throw std::invalid_argument("norm_Lq requires q >= 1");
  const auto& quad = TriQuadrature::get();
  double acc = 0.0;
  const int nt = f.space->mesh().n_triangles();
  for (int t = 0; t < nt; ++t) {
    const double area = f.space->tri_area(t);
    for (int k = 0; k < TriQuadrature::n_points; ++k)
      acc += quad.weights[k] * area * std::pow(std::abs(f.value_in_tri(t, quad.bary[k])), q);
  }
  return std::pow(acc, 1.0 / q);
}

double norm_H1mu(const FeFunction& f, double mu) {
  if (mu < 1.0) throw std::invalid_argument("norm_H1mu requires mu >= 1");
  const auto& quad = TriQuadrature::get();
  double acc = 0.0;
  const int nt = f.space->mesh().n_triangles();
  for (int t = 0; t < nt; ++t) {
    const double area = f.space->tri_area(t);
    for (int k = 0; k < TriQuadrature::n_points; ++k) {
      const double v = f.value_in_tri(t, quad.bary[k]);
      const double gn = f.gradient_in_tri(t, quad.bary[k]).norm();
      acc += quad.weights[k] * area * (std::pow(std::abs(v), mu) + std::pow(gn, mu));
    }
  }
  return std::pow(acc, 1.0 / mu);
}

namespace {

// Fixed per-triangle refinement points (barycentric). Levels are nested so
// denser sampling can only increase sup-type estimates.
const std::vector<std::array<double, 3>>& refinement_points(int level) {
  static const std::vector<std::array<double, 3>> l0;
  static const std::vector<std::array<double, 3>> l1 = {
      {0.5, 0.25, 0.25},          {0.25, 0.5, 0.25},          {0.25, 0.25, 0.5},
      {2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 6, 2.0 / 3}};
  static const std::vector<std::array<double, 3>> l2 = [] {
    auto v = l1;
    v.push_back({0.6, 0.2, 0.2});
    v.push_back({0.2, 0.6, 0.2});
    v.push_back({0.2, 0.2, 0.6});
    const double a = 0.5, b = 1.0 / 3.0, c = 1.0 - a - b;
    v.push_back({a, b, c});
    v.push_back({a, c, b});
    v.push_back({b, a, c});
    v.push_back({b, c, a});
    v.push_back({c, a, b});
    v.push_back({c, b, a});
    return v;
  }();
  switch (level) {
    case 0: return l0;
    case 1: return l1;
    default: return l2;
  }
}

} // namespace

SampleSet sample_values(const FeFunction& f, int level) {
  SampleSet s;
  const auto& pts = f.space->dof_points();
  s.points.assign(pts.begin(), pts.end());
  s.values.resize(pts.size());
  for (std::size_t d = 0; d < pts.size(); ++d) s.values[d] = f.coeffs[static_cast<int>(d)];
  const auto& extra = refinement_points(level);
  const TriMesh& m = f.space->mesh();
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    for (const auto& l : extra) {
      const Vec2 p = l[0] * m.vertices[tri[0]] + l[1] * m.vertices[tri[1]] + l[2] * m.vertices[tri[2]];
      s.points.push_back(p);
      s.values.push_back(f.value_in_tri(t, l));
    }
  }
  return s;
}

SampleSet sample_difference(const FeFunction& f, const std::function<double(const Vec2&)>& g,
                            int level) {
  SampleSet s = sample_values(f, level);
  for (std::size_t i = 0; i < s.points.size(); ++i) s.values[i] -= g(s.points[i]);
  return s;
}

double c0_of_samples(const SampleSet& s) {
  double m = 0.0;
  for (double v : s.values) m = std::max(m, std::abs(v));
  return m;
}

double holder_of_samples(const SampleSet& s, double theta, std::int64_t max_pairs) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("holder: 0 < theta < 1");
  const std::int64_t n = static_cast<std::int64_t>(s.points.size());
  if (n < 2) return 0.0;
  const std::int64_t total = n * (n - 1) / 2;
  const std::int64_t stride = std::max<std::int64_t>(1, (total + max_pairs - 1) / max_pairs);
  double best = 0.0;
  for (std::int64_t t = 0; t < total; t += stride) {
    // invert the lexicographic pair index: base(i) = i*(2n-i-1)/2
    const double tn = static_cast<double>(t);
    std::int64_t i = static_cast<std::int64_t>(
        ((2.0 * n - 1.0) - std::sqrt((2.0 * n - 1.0) * (2.0 * n - 1.0) - 8.0 * tn)) / 2.0);
    i = std::clamp<std::int64_t>(i, 0, n - 2);
    auto base = [&](std::int64_t ii) { return ii * (2 * n - ii - 1) / 2; };
    while (i > 0 && base(i) > t) --i;
    while (base(i + 1) <= t && i + 1 <= n - 2) ++i;
    const std::int64_t j = i + 1 + (t - base(i));
    const double dist = (s.points[static_cast<std::size_t>(i)] - s.points[static_cast<std::size_t>(j)]).norm();
    if (dist <= 0.0) continue;
    const double q =
        std::abs(s.values[static_cast<std::size_t>(i)] - s.values[static_cast<std::size_t>(j)]) /
        std::pow(dist, theta);
    best = std::max(best, q);
  }
  return best;
}

double norm_C0(const FeFunction& f, int level) { return c0_of_samples(sample_values(f, level)); }

double holder_seminorm(const FeFunction& f, double theta, int level, std::int64_t max_pairs) {
  return holder_of_samples(sample_values(f, level), theta, max_pairs);
}

double norm_H1mu_diff(const FeFunction& f, const std::function<double(const Vec2&)>& g,
                      const std::function<Vec2(const Vec2&)>& grad_g, double mu) {
  if (mu < 1.0) throw std::invalid_argument("norm_H1mu_diff requires mu >= 1");
  const auto& quad = TriQuadrature::get();
  const TriMesh& m = f.space->mesh();
  double acc = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    const double area = f.space->tri_area(t);
    for (int k = 0; k < TriQuadrature::n_points; ++k) {
      const auto& l = quad.bary[k];
      const Vec2 p = l[0] * m.vertices[tri[0]] + l[1] * m.vertices[tri[1]] + l[2] * m.vertices[tri[2]];
      const double dv = f.value_in_tri(t, l) - g(p);
      const double dg = (f.gradient_in_tri(t, l) - grad_g(p)).norm();
      acc += quad.weights[k] * area * (std::pow(std::abs(dv), mu) + std::pow(dg, mu));
    }
  }
  return std::pow(acc, 1.0 / mu);
}

void write_fe_function(std::ostream& os, const FeFunction& f) {
  os << "pmcf-fun v1\n";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(mesh_checksum(f.space->mesh())));
  os << "mesh " << buf << "\n";
  for (int d = 0; d < f.space->n_dofs(); ++d) os << format_double(f.coeffs[d]) << "\n";
}

FeFunction read_fe_function(std::istream& is, std::shared_ptr<const P2Space> space) {
  std::string header;
  std::getline(is, header);
  if (header != "pmcf-fun v1") throw std::runtime_error("bad function header: " + header);
  std::string tag, sum;
  is >> tag >> sum;
  if (tag != "mesh") throw std::runtime_error("missing mesh checksum");
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(mesh_checksum(space->mesh())));
  if (sum != buf) throw std::runtime_error("function dump belongs to a different mesh");
  FeFunction f(space);
  for (int d = 0; d < space->n_dofs(); ++d) is >> f.coeffs[d];
  if (!is) throw std::runtime_error("truncated function file");
  return f;
}

} // namespace pmcf
