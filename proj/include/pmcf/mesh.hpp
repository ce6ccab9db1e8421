#pragma once

#include "pmcf/geometry.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

namespace pmcf {

/// Conforming triangulation of the discrete domain Omega_h. Boundary
/// vertices lie on the smooth boundary; immutable after construction.
struct TriMesh {
  DomainGeometry domain = DomainGeometry::disk(1.0);
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::uint8_t> boundary_vertex; // 1 iff vertex lies on the smooth boundary
  double mesh_size_h = 0.0;                  // max edge length

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
};

struct MeshOptions {
  double min_angle_deg = 20.0;
  int max_smoothing_sweeps = 30;
};

/// Structured polar mesh of a disk or ellipse with boundary vertices placed
/// exactly on the smooth boundary. Guarantees mesh_size_h <= 1.2 * target_h.
TriMesh build_mesh(const DomainGeometry& domain, double target_h,
                   const MeshOptions& opts = {});

/// sup over the polygonal boundary of |signed_distance| / h^2, sampled with
/// 33 points per boundary edge.
double sandwich_constant(const TriMesh& mesh);

/// Edges as sorted vertex pairs in lexicographic order, plus per-edge
/// incidence count (1 = boundary edge, 2 = interior edge).
struct EdgeTable {
  std::vector<std::array<int, 2>> edges;
  std::vector<int> incidence;
  std::vector<std::array<int, 3>> tri_edges; // local edges (01, 12, 20)
};
EdgeTable build_edge_table(const TriMesh& mesh);

double min_angle_deg(const TriMesh& mesh);
double signed_area(const Vec2& a, const Vec2& b, const Vec2& c);

/// Structural checks: conformity, positive orientation, boundary fitting,
/// two-boundary-vertex rule for triangles with a boundary edge.
/// Throws std::runtime_error with a description on the first violation.
void check_mesh_invariants(const TriMesh& mesh, double min_angle_floor_deg = 20.0);

/// ASCII serialization, "pmcf-mesh v1". Round-trips bit-exactly.
void write_mesh(std::ostream& os, const TriMesh& mesh);
TriMesh read_mesh(std::istream& is, const DomainGeometry& domain);
void save_mesh(const std::string& path, const TriMesh& mesh);
TriMesh load_mesh(const std::string& path, const DomainGeometry& domain);

/// FNV-1a hash of the ASCII serialization; ties solution dumps to a mesh.
std::uint64_t mesh_checksum(const TriMesh& mesh);

/// Shortest-format decimal that parses back to the same double.
std::string format_double(double v);

} // namespace pmcf
