#include "pmcf/experiments.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace pmcf;

namespace {

FeFunction solve_disk(double R, double h, double epsilon, double k,
                      const std::vector<double>& schedule, const std::string& mode, double tol) {
  auto space = make_p2_space(build_mesh(DomainGeometry::disk(R), h));
  SolveOptions opts;
  opts.mode = mode == "frozen" ? IterationMode::Frozen : IterationMode::Newton;
  opts.tol = tol;
  std::vector<double> sched = schedule;
  if (sched.empty()) {
    double e = std::max(epsilon, 2.0);
    while (e > epsilon * (1.0 + 1e-12)) {
      sched.push_back(e);
      e /= 2.0;
    }
    sched.push_back(epsilon);
  }
  RegParams rp{epsilon, k};
  auto [w, reports] = continuation_solve(space, rp, sched, opts);
  return w;
}

} // namespace

PYBIND11_MODULE(_pmcf, m) {
  m.doc() = "finite-element lab for the regularized level-set power mean curvature flow";

  py::class_<RegParams>(m, "RegParams")
      .def(py::init<double, double>(), py::arg("epsilon"), py::arg("k"))
      .def_readwrite("epsilon", &RegParams::epsilon)
      .def_readwrite("k", &RegParams::k);

  py::class_<CouplingParams>(m, "CouplingParams")
      .def(py::init<>())
      .def_readwrite("beta", &CouplingParams::beta)
      .def_readwrite("c_coupling", &CouplingParams::c_coupling)
      .def_readwrite("delta", &CouplingParams::delta)
      .def_readwrite("gamma_ball", &CouplingParams::gamma_ball)
      .def_readwrite("mu", &CouplingParams::mu);

  py::class_<DomainGeometry>(m, "DomainGeometry")
      .def_static("disk", &DomainGeometry::disk, py::arg("radius"))
      .def_static("ellipse", &DomainGeometry::ellipse, py::arg("a"), py::arg("b"))
      .def("signed_distance",
           [](const DomainGeometry& g, double x, double y) {
             return g.signed_distance(Vec2(x, y));
           })
      .def_property_readonly("diameter", &DomainGeometry::diameter);

  py::class_<TriMesh>(m, "TriMesh")
      .def_property_readonly("n_vertices", &TriMesh::n_vertices)
      .def_property_readonly("n_triangles", &TriMesh::n_triangles)
      .def_readonly("mesh_size_h", &TriMesh::mesh_size_h)
      .def_property_readonly("vertices",
                             [](const TriMesh& mesh) {
                               Eigen::MatrixXd v(mesh.n_vertices(), 2);
                               for (int i = 0; i < mesh.n_vertices(); ++i)
                                 v.row(i) = mesh.vertices[i].transpose();
                               return v;
                             })
      .def_property_readonly("triangles",
                             [](const TriMesh& mesh) {
                               Eigen::MatrixXi t(mesh.n_triangles(), 3);
                               for (int i = 0; i < mesh.n_triangles(); ++i)
                                 for (int j = 0; j < 3; ++j) t(i, j) = mesh.triangles[i][j];
                               return t;
                             })
      .def("to_ascii", [](const TriMesh& mesh) {
        std::ostringstream os;
        write_mesh(os, mesh);
        return os.str();
      });

  m.def("build_mesh",
        [](const DomainGeometry& dom, double h) { return build_mesh(dom, h); },
        py::arg("domain"), py::arg("target_h"));
  m.def("sandwich_constant", &sandwich_constant);
  m.def("min_angle_deg", &min_angle_deg);

  py::class_<P2Space, std::shared_ptr<P2Space>>(m, "P2Space")
      .def_property_readonly("n_dofs", &P2Space::n_dofs)
      .def_property_readonly("dof_points", [](const P2Space& sp) {
        Eigen::MatrixXd p(sp.n_dofs(), 2);
        for (int i = 0; i < sp.n_dofs(); ++i) p.row(i) = sp.dof_points()[i].transpose();
        return p;
      });
  m.def("make_p2_space", [](const TriMesh& mesh) {
    return std::const_pointer_cast<P2Space>(make_p2_space(mesh));
  });

  py::class_<FeFunction>(m, "FeFunction")
      .def(py::init([](std::shared_ptr<P2Space> sp) { return FeFunction(std::move(sp)); }))
      .def_property(
          "coeffs", [](const FeFunction& f) { return f.coeffs; },
          [](FeFunction& f, const Eigen::VectorXd& c) { f.coeffs = c; })
      .def("__call__",
           [](const FeFunction& f, double x, double y) { return evaluate(f, Vec2(x, y)); })
      .def("gradient", [](const FeFunction& f, double x, double y) {
        return Vec2(evaluate_gradient(f, Vec2(x, y)));
      });

  m.def("interpolate",
        [](std::shared_ptr<P2Space> sp, const std::function<double(double, double)>& g) {
          return interpolate(std::move(sp),
                             [&g](const Vec2& p) { return g(p.x(), p.y()); });
        });
  m.def("boundary_correct", &boundary_correct);
  m.def("norm_C0", &norm_C0, py::arg("f"), py::arg("level") = 1);
  m.def("norm_Lq", &norm_Lq);
  m.def("norm_H1mu", &norm_H1mu);
  m.def("holder_seminorm", &holder_seminorm, py::arg("f"), py::arg("theta"),
        py::arg("level") = 1, py::arg("max_pairs") = 1000000);

  m.def("f_eps", [](double zx, double zy, const RegParams& rp) {
    return f_eps(Vec2(zx, zy), rp);
  });
  m.def("f_eps_grad", [](double zx, double zy, const RegParams& rp) {
    return Vec2(f_eps_grad(Vec2(zx, zy), rp));
  });
  m.def("f_eps_hess", [](double zx, double zy, const RegParams& rp) {
    return Eigen::Matrix2d(f_eps_hess(Vec2(zx, zy), rp));
  });
  m.def("hessian_eigen_bounds", [](double zx, double zy, const RegParams& rp) {
    return hessian_eigen_bounds(Vec2(zx, zy), rp);
  });
  m.def("assemble_residual", &assemble_residual);

  m.def("solve_disk", &solve_disk, py::arg("R"), py::arg("h"), py::arg("epsilon"), py::arg("k"),
        py::arg("schedule") = std::vector<double>{}, py::arg("mode") = "newton",
        py::arg("tol") = 1e-10);
  m.def("coupled_mesh_size", &coupled_mesh_size);
  m.def("contraction_probe", &contraction_probe, py::arg("w_ref"), py::arg("rp"),
        py::arg("sigma"), py::arg("trials"), py::arg("mu") = 3.0,
        py::arg("seed") = 20130813u);

  py::class_<RateExponents>(m, "RateExponents")
      .def_readonly("k", &RateExponents::k)
      .def_readonly("alpha", &RateExponents::alpha)
      .def_readonly("gamma", &RateExponents::gamma)
      .def_readonly("s", &RateExponents::s)
      .def_readonly("r", &RateExponents::r)
      .def_readonly("beta1", &RateExponents::beta1)
      .def_readonly("beta2", &RateExponents::beta2)
      .def_readonly("feasibility_margins", &RateExponents::feasibility_margins)
      .def_readonly("at_gamma_boundary", &RateExponents::at_gamma_boundary)
      .def("lambda_of", &RateExponents::lambda, py::arg("theta"));
  m.def("beta_exponents", &beta_exponents);
  m.def("optimize_rate", &optimize_rate, py::arg("k"), py::arg("gamma_max"), py::arg("margin"),
        py::arg("grid_points") = 2000);

  m.def("exact_disk_arrival_time", [](double k, double R, double x, double y) {
    return exact_disk_arrival_time(k, R, Vec2(x, y));
  });
  py::class_<RadialProfile>(m, "RadialProfile")
      .def_readonly("radii", &RadialProfile::radii)
      .def_readonly("values", &RadialProfile::values)
      .def_readonly("solver_tol", &RadialProfile::solver_tol)
      .def("__call__", &RadialProfile::value)
      .def("derivative", &RadialProfile::derivative);
  m.def("radial_regularized_solve", &radial_regularized_solve, py::arg("rp"), py::arg("R"),
        py::arg("grid_n"), py::arg("tol"));

  m.def("eoc", &eoc);
  m.def("run_epsilon_study", [](double k, double theta, const std::vector<double>& eps_list) {
    const EpsStudy s = run_epsilon_study(k, theta, eps_list);
    py::list rows;
    for (const auto& row : s.rows)
      rows.append(py::make_tuple(row.epsilon, row.c0_error, row.holder_error));
    return py::make_tuple(rows, s.c0_fit.slope, s.holder_fit.slope, s.predicted_min_rs);
  });
}
