#include "pmcf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pmcf {

namespace {

constexpr double kPi = std::numbers::pi;

int ring_start(int i) { return i == 0 ? 0 : 1 + 3 * i * (i - 1); }

// Hexagonal polar mesh of the unit disk: ring i carries 6i vertices,
// which keeps triangles near-equilateral and the mesh symmetric under
// rotations by 60 degrees.
void build_unit_hex_mesh(int rings, std::vector<Vec2>& vertices,
                         std::vector<std::array<int, 3>>& triangles) {
  vertices.clear();
  triangles.clear();
  vertices.push_back({0.0, 0.0});
  for (int i = 1; i <= rings; ++i) {
    const double rho = static_cast<double>(i) / rings;
    const int n = 6 * i;
    for (int j = 0; j < n; ++j) {
      const double th = 2.0 * kPi * j / n;
      vertices.push_back({rho * std::cos(th), rho * std::sin(th)});
    }
  }
  for (int i = 1; i <= rings; ++i) {
    const int n_out = 6 * i;
    const int n_in = 6 * (i - 1);
    const int base_out = ring_start(i);
    const int base_in = ring_start(i - 1);
    for (int s = 0; s < 6; ++s) {
      for (int t = 0; t < i; ++t) {
        const int o0 = base_out + (s * i + t) % n_out;
        const int o1 = base_out + (s * i + t + 1) % n_out;
        const int in0 = i == 1 ? 0 : base_in + (s * (i - 1) + t) % n_in;
        triangles.push_back({o0, o1, in0});
      }
      for (int t = 0; t + 1 < i; ++t) {
        const int o1 = base_out + (s * i + t + 1) % n_out;
        const int in0 = base_in + (s * (i - 1) + t) % n_in;
        const int in1 = base_in + (s * (i - 1) + t + 1) % n_in;
        triangles.push_back({o1, in1, in0});
      }
    }
  }
}

double max_edge_length(const TriMesh& m) {
  double h = 0.0;
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e)
      h = std::max(h, (m.vertices[t[e]] - m.vertices[t[(e + 1) % 3]]).norm());
  return h;
}

void orient_positively(TriMesh& m) {
  for (auto& t : m.triangles)
    if (signed_area(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]) < 0.0)
      std::swap(t[1], t[2]);
}

void laplace_smooth_interior(TriMesh& m) {
  std::vector<Vec2> sum(m.vertices.size(), Vec2::Zero());
  std::vector<int> count(m.vertices.size(), 0);
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      sum[a] += m.vertices[b];
      sum[b] += m.vertices[a];
      ++count[a];
      ++count[b];
    }
  for (int v = 0; v < m.n_vertices(); ++v)
    if (!m.boundary_vertex[v] && count[v] > 0)
      m.vertices[v] = sum[v] / count[v]; // each interior edge counted twice; ratio unaffected
}

} // namespace

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

double min_angle_deg(const TriMesh& mesh) {
  double worst = 180.0;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const Vec2 u = mesh.vertices[t[(e + 1) % 3]] - mesh.vertices[t[e]];
      const Vec2 v = mesh.vertices[t[(e + 2) % 3]] - mesh.vertices[t[e]];
      const double cosang = u.dot(v) / (u.norm() * v.norm());
      worst = std::min(worst, std::acos(std::clamp(cosang, -1.0, 1.0)) * 180.0 / kPi);
    }
  }
  return worst;
}

TriMesh build_mesh(const DomainGeometry& domain, double target_h, const MeshOptions& opts) {
  if (target_h <= 0.0) throw std::invalid_argument("target_h must be positive");
  if (domain.kind() == DomainGeometry::Kind::Custom)
    throw std::invalid_argument("build_mesh generates disk/ellipse meshes; import custom domains");
  const double a = domain.semi_axis_a(), b = domain.semi_axis_b();
  if (target_h >= 2.0 * domain.min_curvature_radius())
    throw std::invalid_argument("target_h too coarse to resolve the boundary");

  int rings = std::max<int>(1, static_cast<int>(std::ceil(std::max(a, b) / target_h)));
  for (;; ++rings) {
    TriMesh m;
    m.domain = domain;
    build_unit_hex_mesh(rings, m.vertices, m.triangles);
    for (auto& v : m.vertices) v = Vec2(a * v.x(), b * v.y());
    // Snap the outer ring onto the smooth boundary (exact for disk/ellipse
    // already; projection guards against roundoff in the parametrization).
    m.boundary_vertex.assign(m.vertices.size(), 0);
    for (int v = ring_start(rings); v < m.n_vertices(); ++v) {
      m.boundary_vertex[v] = 1;
      m.vertices[v] = domain.boundary_projection(m.vertices[v]);
    }
    orient_positively(m);
    m.mesh_size_h = max_edge_length(m);
    if (m.mesh_size_h > 1.2 * target_h) continue;

    if (min_angle_deg(m) < opts.min_angle_deg) {
      int sweep = 0;
      for (; sweep < opts.max_smoothing_sweeps && min_angle_deg(m) < opts.min_angle_deg; ++sweep)
        laplace_smooth_interior(m);
      orient_positively(m);
      m.mesh_size_h = max_edge_length(m);
      if (min_angle_deg(m) < opts.min_angle_deg)
        throw std::runtime_error("mesh quality below min-angle floor after smoothing");
      if (m.mesh_size_h > 1.2 * target_h) continue;
    }
    return m;
  }
}

EdgeTable build_edge_table(const TriMesh& mesh) {
  std::map<std::array<int, 2>, int> index;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      std::array<int, 2> key{t[e], t[(e + 1) % 3]};
      if (key[0] > key[1]) std::swap(key[0], key[1]);
      index.emplace(key, 0);
    }
  EdgeTable tab;
  tab.edges.reserve(index.size());
  int id = 0;
  for (auto& [key, val] : index) {
    val = id++;
    tab.edges.push_back(key);
  }
  tab.incidence.assign(tab.edges.size(), 0);
  tab.tri_edges.resize(mesh.triangles.size());
  for (std::size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
    const auto& t = mesh.triangles[ti];
    for (int e = 0; e < 3; ++e) {
      std::array<int, 2> key{t[e], t[(e + 1) % 3]};
      if (key[0] > key[1]) std::swap(key[0], key[1]);
      const int eid = index.at(key);
      tab.tri_edges[ti][e] = eid;
      ++tab.incidence[eid];
    }
  }
  return tab;
}

double sandwich_constant(const TriMesh& mesh) {
  const EdgeTable tab = build_edge_table(mesh);
  double worst = 0.0;
  for (std::size_t e = 0; e < tab.edges.size(); ++e) {
    if (tab.incidence[e] != 1) continue;
    const Vec2 p = mesh.vertices[tab.edges[e][0]];
    const Vec2 q = mesh.vertices[tab.edges[e][1]];
    for (int s = 0; s <= 32; ++s) {
      const double t = static_cast<double>(s) / 32.0;
      worst = std::max(worst, std::abs(mesh.domain.signed_distance(p + t * (q - p))));
    }
  }
  return worst / (mesh.mesh_size_h * mesh.mesh_size_h);
}

void check_mesh_invariants(const TriMesh& mesh, double min_angle_floor_deg) {
  const double dia = mesh.domain.diameter();
  const double bdry_tol = 1e-10 * dia;
  for (const auto& t : mesh.triangles)
    if (signed_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]) <= 0.0)
      throw std::runtime_error("non-positively oriented triangle");
  if (min_angle_deg(mesh) < min_angle_floor_deg)
    throw std::runtime_error("min angle below floor");

  const EdgeTable tab = build_edge_table(mesh);
  for (int c : tab.incidence)
    if (c < 1 || c > 2) throw std::runtime_error("non-conforming edge incidence");

  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const double d = std::abs(mesh.domain.signed_distance(mesh.vertices[v]));
    if (mesh.boundary_vertex[v] && d > bdry_tol)
      throw std::runtime_error("boundary vertex off the smooth boundary");
  }
  // Triangles owning a boundary edge carry exactly two boundary vertices.
  std::set<int> bdry_edges;
  for (std::size_t e = 0; e < tab.edges.size(); ++e)
    if (tab.incidence[e] == 1) bdry_edges.insert(static_cast<int>(e));
  for (std::size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
    bool has_bdry_edge = false;
    for (int e = 0; e < 3; ++e)
      if (bdry_edges.count(tab.tri_edges[ti][e])) has_bdry_edge = true;
    if (!has_bdry_edge) continue;
    int on_bdry = 0;
    for (int v : mesh.triangles[ti])
      if (std::abs(mesh.domain.signed_distance(mesh.vertices[v])) <= bdry_tol) ++on_bdry;
    if (on_bdry != 2)
      throw std::runtime_error("boundary triangle without exactly two boundary vertices");
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_mesh(std::ostream& os, const TriMesh& mesh) {
  os << "pmcf-mesh v1\n";
  os << "V " << mesh.n_vertices() << "\n";
  for (const auto& v : mesh.vertices)
    os << format_double(v.x()) << " " << format_double(v.y()) << "\n";
  os << "T " << mesh.n_triangles() << "\n";
  for (const auto& t : mesh.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
  int nb = 0;
  for (auto f : mesh.boundary_vertex) nb += f;
  os << "B " << nb << "\n";
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (mesh.boundary_vertex[v]) os << v << "\n";
}

TriMesh read_mesh(std::istream& is, const DomainGeometry& domain) {
  std::string header;
  std::getline(is, header);
  if (header != "pmcf-mesh v1") throw std::runtime_error("bad mesh header: " + header);
  TriMesh m;
  m.domain = domain;
  std::string tag;
  int count = 0;
  is >> tag >> count;
  if (tag != "V" || count < 0) throw std::runtime_error("bad vertex section");
  m.vertices.resize(count);
  for (auto& v : m.vertices) is >> v.x() >> v.y();
  is >> tag >> count;
  if (tag != "T" || count < 0) throw std::runtime_error("bad triangle section");
  m.triangles.resize(count);
  for (auto& t : m.triangles) {
    is >> t[0] >> t[1] >> t[2];
    for (int v : t)
      if (v < 0 || v >= m.n_vertices()) throw std::runtime_error("triangle index out of range");
  }
  is >> tag >> count;
  if (tag != "B" || count < 0) throw std::runtime_error("bad boundary section");
  m.boundary_vertex.assign(m.vertices.size(), 0);
  for (int i = 0; i < count; ++i) {
    int v = 0;
    is >> v;
    if (v < 0 || v >= m.n_vertices()) throw std::runtime_error("boundary index out of range");
    m.boundary_vertex[v] = 1;
  }
  if (!is) throw std::runtime_error("truncated mesh file");
  m.mesh_size_h = max_edge_length(m);
  return m;
}

void save_mesh(const std::string& path, const TriMesh& mesh) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_mesh(os, mesh);
}

TriMesh load_mesh(const std::string& path, const DomainGeometry& domain) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_mesh(is, domain);
}

std::uint64_t mesh_checksum(const TriMesh& mesh) {
  std::ostringstream os;
  write_mesh(os, mesh);
  const std::string text = os.str();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

} // namespace pmcf
