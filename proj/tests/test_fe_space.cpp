#include "pmcf/fe_space.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace pmcf;

namespace {

std::shared_ptr<const P2Space> disk_space(double h, double R = 1.0) {
  return make_p2_space(build_mesh(DomainGeometry::disk(R), h));
}

} // namespace

TEST_CASE("partition of unity at quadrature points") {
  const auto& quad = TriQuadrature::get();
  for (int q = 0; q < TriQuadrature::n_points; ++q) {
    std::array<double, 6> N;
    p2_shape(quad.bary[q], N);
    double s = 0.0;
    for (double v : N) s += v;
    CHECK(std::abs(s - 1.0) <= 1e-13);
  }
  double wsum = 0.0;
  for (double w : quad.weights) wsum += w;
  CHECK(std::abs(wsum - 1.0) <= 1e-14);
}

TEST_CASE("dof bookkeeping: counts and boundary flags") {
  const auto sp = disk_space(0.4);
  CHECK(sp->n_dofs() == sp->n_vertices() + sp->n_edges());
  for (int d = 0; d < sp->n_dofs(); ++d) {
    const bool near_bdry = std::abs(sp->dof_points()[d].norm() - 1.0) < 1e-9;
    if (sp->dof_on_boundary()[d])
      CHECK(std::abs(sp->mesh().domain.signed_distance(sp->dof_points()[d])) <
            0.2 * sp->mesh().mesh_size_h * sp->mesh().mesh_size_h + 1e-12);
    if (near_bdry) CHECK(sp->dof_on_boundary()[d]);
  }
  CHECK(sp->interior_dofs().size() + sp->boundary_dofs().size() ==
        static_cast<std::size_t>(sp->n_dofs()));
}

TEST_CASE("P2 reproduces quadratics exactly") {
  const auto sp = disk_space(0.4);
  auto g = [](const Vec2& p) { return p.x() * p.x(); };
  const FeFunction f = interpolate(sp, g);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int i = 0; i < 50; ++i) {
    const Vec2 p(u(rng), u(rng));
    CHECK(evaluate(f, p) == doctest::Approx(g(p)).epsilon(1e-12));
    const Vec2 grad = evaluate_gradient(f, p);
    CHECK(grad.x() == doctest::Approx(2.0 * p.x()).epsilon(1e-10));
    CHECK(std::abs(grad.y()) <= 1e-10);
  }
}

TEST_CASE("zero function evaluates to zero; constant interpolates to ones") {
  const auto sp = disk_space(0.5);
  const FeFunction z(sp);
  CHECK(evaluate(z, Vec2(0.1, 0.2)) == 0.0);
  CHECK(norm_C0(z) == 0.0);
  CHECK(norm_Lq(z, 2.0) == 0.0);
  const FeFunction one = interpolate(sp, [](const Vec2&) { return 1.0; });
  for (int d = 0; d < sp->n_dofs(); ++d) CHECK(one.coeffs[d] == 1.0);
}

TEST_CASE("values agree across shared edges") {
  const auto sp = disk_space(0.5);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FeFunction f(sp);
  for (int d = 0; d < sp->n_dofs(); ++d) f.coeffs[d] = u(rng);
  const auto& tab = sp->edge_table();
  int checked = 0;
  for (std::size_t e = 0; e < tab.edges.size() && checked < 40; ++e) {
    if (tab.incidence[e] != 2) continue;
    // find both adjacent triangles
    std::vector<int> tris;
    for (int t = 0; t < sp->mesh().n_triangles(); ++t)
      for (int le = 0; le < 3; ++le)
        if (tab.tri_edges[t][le] == static_cast<int>(e)) tris.push_back(t);
    REQUIRE(tris.size() == 2);
    const Vec2 a = sp->mesh().vertices[tab.edges[e][0]];
    const Vec2 b = sp->mesh().vertices[tab.edges[e][1]];
    for (double t : {0.23, 0.61, 0.88}) {
      const Vec2 p = a + t * (b - a);
      double vals[2];
      for (int s = 0; s < 2; ++s) {
        // barycentric of p inside triangle tris[s]
        const auto& tri = sp->mesh().triangles[tris[s]];
        const auto& g = sp->tri_grad_lambda(tris[s]);
        const Vec2 p0 = sp->mesh().vertices[tri[0]];
        const double l1 = g[1].dot(p - p0), l2 = g[2].dot(p - p0);
        vals[s] = f.value_in_tri(tris[s], {1.0 - l1 - l2, l1, l2});
      }
      CHECK(std::abs(vals[0] - vals[1]) <= 1e-13 * (1.0 + std::abs(vals[0])));
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("interpolation of x^3 converges at order 2 in H^{1,inf}") {
  auto g = [](const Vec2& p) { return p.x() * p.x() * p.x(); };
  auto dg = [](const Vec2& p) { return Vec2(3.0 * p.x() * p.x(), 0.0); };
  std::vector<double> errs, hs;
  for (double h : {0.2, 0.1, 0.05}) {
    const auto sp = disk_space(h);
    const FeFunction f = interpolate(sp, g);
    double err = 0.0;
    const TriMesh& m = sp->mesh();
    for (int t = 0; t < m.n_triangles(); ++t) {
      const auto& tri = m.triangles[t];
      const int nsub = 6;
      for (int i = 0; i <= nsub; ++i)
        for (int j = 0; i + j <= nsub; ++j) {
          const double l1 = static_cast<double>(i) / nsub, l2 = static_cast<double>(j) / nsub;
          const std::array<double, 3> l{1.0 - l1 - l2, l1, l2};
          const Vec2 p = l[0] * m.vertices[tri[0]] + l[1] * m.vertices[tri[1]] +
                         l[2] * m.vertices[tri[2]];
          err = std::max(err, std::abs(f.value_in_tri(t, l) - g(p)));
          err = std::max(err, (f.gradient_in_tri(t, l) - dg(p)).norm());
        }
    }
    errs.push_back(err);
    hs.push_back(sp->mesh().mesh_size_h);
  }
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    const double eoc = std::log(errs[i] / errs[i + 1]) / std::log(hs[i] / hs[i + 1]);
    CHECK(eoc >= 1.9);
  }
}

TEST_CASE("quadratic g interpolates with zero H^{1,inf} error") {
  const auto sp = disk_space(0.4);
  auto g = [](const Vec2& p) { return 1.0 + 2.0 * p.x() - p.y() + 0.5 * p.x() * p.y(); };
  const FeFunction f = interpolate(sp, g);
  const auto& quad = TriQuadrature::get();
  const TriMesh& m = sp->mesh();
  for (int t = 0; t < m.n_triangles(); ++t)
    for (int q = 0; q < TriQuadrature::n_points; ++q) {
      const auto& l = quad.bary[q];
      const auto& tri = m.triangles[t];
      const Vec2 p =
          l[0] * m.vertices[tri[0]] + l[1] * m.vertices[tri[1]] + l[2] * m.vertices[tri[2]];
      CHECK(std::abs(f.value_in_tri(t, l) - g(p)) <= 1e-12);
    }
}

TEST_CASE("boundary_correct zeroes the trace and keeps interior coefficients") {
  const auto sp = disk_space(0.3);
  auto g = [](const Vec2& p) { return 1.0 - p.squaredNorm(); };
  const FeFunction f = interpolate(sp, g);
  const FeFunction cor = boundary_correct(f);
  CHECK(cor.in_vh());
  for (int d : sp->interior_dofs()) CHECK(cor.coeffs[d] == f.coeffs[d]);
  CHECK(boundary_correct(cor).coeffs == cor.coeffs);
}

TEST_CASE("boundary correction z_h obeys the h^2 and h^{1+1/q} bounds") {
  auto g = [](const Vec2& p) { return 1.0 - p.squaredNorm(); };
  auto dg = [](const Vec2& p) { return Vec2(-2.0 * p.x(), -2.0 * p.y()); };
  std::vector<double> zc0_ratio, h1q_ratio;
  for (double h : {0.2, 0.1, 0.05}) {
    const auto sp = disk_space(h);
    const double hm = sp->mesh().mesh_size_h;
    const FeFunction f = interpolate(sp, g);
    const FeFunction cor = boundary_correct(f);
    FeFunction z = f;
    z.coeffs -= cor.coeffs;
    zc0_ratio.push_back(norm_C0(z) / (hm * hm));
    // (901) with q = 2: || u~ - g ||_{H^{1,2}} <= c h^{1.5}
    const double e = norm_H1mu_diff(cor, g, dg, 2.0);
    h1q_ratio.push_back(e / std::pow(hm, 1.5));
  }
  for (double r : zc0_ratio) {
    CHECK(r <= 4.0 * zc0_ratio.front());
    CHECK(r >= 0.25 * zc0_ratio.front());
  }
  for (double r : h1q_ratio) CHECK(r <= 4.0 * h1q_ratio.front());
}

TEST_CASE("norms: zero, constants, and the H1 identity") {
  const auto sp = disk_space(0.4);
  const FeFunction z(sp);
  CHECK(norm_H1mu(z, 3.0) == 0.0);
  CHECK(holder_seminorm(z, 0.5) == 0.0);

  const FeFunction c = interpolate(sp, [](const Vec2&) { return -2.5; });
  CHECK(norm_C0(c) == doctest::Approx(2.5));
  CHECK(holder_seminorm(c, 0.3) <= 1e-14);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FeFunction f(sp);
  for (int d = 0; d < sp->n_dofs(); ++d) f.coeffs[d] = u(rng);
  const double h1 = norm_H1mu(f, 2.0);
  const double l2 = norm_Lq(f, 2.0);
  // gradient L2 norm via the same quadrature
  double acc = 0.0;
  const auto& quad = TriQuadrature::get();
  for (int t = 0; t < sp->mesh().n_triangles(); ++t)
    for (int q = 0; q < TriQuadrature::n_points; ++q)
      acc += quad.weights[q] * sp->tri_area(t) * f.gradient_in_tri(t, quad.bary[q]).squaredNorm();
  CHECK(h1 * h1 == doctest::Approx(l2 * l2 + acc).epsilon(1e-12));
}

TEST_CASE("holder seminorm of x1 on the unit disk at theta 1/2") {
  const auto sp = disk_space(0.4);
  const FeFunction f = interpolate(sp, [](const Vec2& p) { return p.x(); });
  const double sn = holder_seminorm(f, 0.5);
  CHECK(sn <= std::sqrt(2.0) + 1e-6);
  CHECK(sn >= 1.0);
}

TEST_CASE("holder seminorm never decreases with sampling density") {
  const auto sp = disk_space(0.5);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FeFunction f(sp);
  for (int d = 0; d < sp->n_dofs(); ++d) f.coeffs[d] = u(rng);
  const double s0 = holder_seminorm(f, 0.4, 0);
  const double s1 = holder_seminorm(f, 0.4, 1);
  const double s2 = holder_seminorm(f, 0.4, 2);
  CHECK(s1 >= s0);
  CHECK(s2 >= s1);
}

TEST_CASE("function dump round trips and is tied to its mesh") {
  const auto sp = disk_space(0.5);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FeFunction f(sp);
  for (int d = 0; d < sp->n_dofs(); ++d) f.coeffs[d] = u(rng);
  std::ostringstream os;
  write_fe_function(os, f);
  std::istringstream is(os.str());
  const FeFunction f2 = read_fe_function(is, sp);
  CHECK(f2.coeffs == f.coeffs);

  const auto other = disk_space(0.4);
  std::istringstream is2(os.str());
  CHECK_THROWS(read_fe_function(is2, other));
}

TEST_CASE("evaluate rejects points outside the mesh") {
  const auto sp = disk_space(0.5);
  const FeFunction z(sp);
  CHECK_THROWS(evaluate(z, Vec2(2.0, 2.0)));
}
