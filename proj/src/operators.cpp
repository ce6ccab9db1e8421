#include "pmcf/operators.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <vector>

namespace pmcf {

void RegParams::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("RegParams: epsilon must be > 0");
  if (!(k > 1.0)) throw std::invalid_argument("RegParams: k must be > 1");
}

double f_eps(const Vec2& z, const RegParams& rp) {
  return std::sqrt(z.squaredNorm() + rp.epsilon * rp.epsilon);
}

Vec2 f_eps_grad(const Vec2& z, const RegParams& rp) { return z / f_eps(z, rp); }

Eigen::Matrix2d f_eps_hess(const Vec2& z, const RegParams& rp) {
  const double fe = f_eps(z, rp);
  return Eigen::Matrix2d::Identity() / fe - (z * z.transpose()) / (fe * fe * fe);
}

std::pair<double, double> hessian_eigen_bounds(const Vec2& z, const RegParams& rp) {
  const double fe = f_eps(z, rp);
  const double along = rp.epsilon * rp.epsilon / (fe * fe * fe);
  const double across = 1.0 / fe;
  return {along, across}; // along <= across since eps^2 <= fe^2
}

namespace {

struct CellScratch {
  std::array<int, 6> dofs;
  std::array<double, 6> N;
  std::array<Vec2, 6> dN;
};

} // namespace

EllipticityReport ellipticity_report(const FeFunction& w, const RegParams& rp) {
  rp.validate();
  const auto& quad = TriQuadrature::get();
  EllipticityReport rep;
  rep.lambda_min = 1e300;
  rep.lambda_max = 0.0;
  const int nt = w.space->mesh().n_triangles();
  for (int t = 0; t < nt; ++t)
    for (int q = 0; q < TriQuadrature::n_points; ++q) {
      const auto [lo, hi] = hessian_eigen_bounds(w.gradient_in_tri(t, quad.bary[q]), rp);
      rep.lambda_min = std::min(rep.lambda_min, lo);
      rep.lambda_max = std::max(rep.lambda_max, hi);
    }
  return rep;
}

Eigen::VectorXd assemble_residual(const FeFunction& w, const RegParams& rp) {
  rp.validate();
  if (!w.in_vh()) throw std::invalid_argument("assemble_residual: w must lie in V_h");
  const P2Space& sp = *w.space;
  const auto& quad = TriQuadrature::get();
  Eigen::VectorXd R = Eigen::VectorXd::Zero(static_cast<int>(sp.interior_dofs().size()));
  CellScratch c;
  const int nt = sp.mesh().n_triangles();
  for (int t = 0; t < nt; ++t) {
    c.dofs = sp.cell_dofs(t);
    const double area = sp.tri_area(t);
    for (int q = 0; q < TriQuadrature::n_points; ++q) {
      const auto& l = quad.bary[q];
      p2_shape(l, c.N);
      p2_shape_grad(l, sp.tri_grad_lambda(t), c.dN);
      Vec2 grad = Vec2::Zero();
      for (int i = 0; i < 6; ++i) grad += w.coeffs[c.dofs[i]] * c.dN[i];
      const double fe = f_eps(grad, rp);
      const double src = std::pow(fe, -1.0 / rp.k);
      const Vec2 flux = grad / fe;
      const double wgt = quad.weights[q] * area;
      for (int i = 0; i < 6; ++i) {
        const int row = sp.interior_index()[c.dofs[i]];
        if (row < 0) continue;
        R[row] += wgt * (flux.dot(c.dN[i]) - src * c.N[i]);
      }
    }
  }
  return R;
}

Eigen::SparseMatrix<double> assemble_linearized(const FeFunction& w_ref, const RegParams& rp) {
  rp.validate();
  if (!w_ref.in_vh()) throw std::invalid_argument("assemble_linearized: w_ref must lie in V_h");
  const P2Space& sp = *w_ref.space;
  const auto& quad = TriQuadrature::get();
  const int n = static_cast<int>(sp.interior_dofs().size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(sp.mesh().n_triangles()) * 36);
  CellScratch c;
  const int nt = sp.mesh().n_triangles();
  for (int t = 0; t < nt; ++t) {
    c.dofs = sp.cell_dofs(t);
    const double area = sp.tri_area(t);
    Eigen::Matrix<double, 6, 6> Ke = Eigen::Matrix<double, 6, 6>::Zero();
    for (int q = 0; q < TriQuadrature::n_points; ++q) {
      const auto& l = quad.bary[q];
      p2_shape(l, c.N);
      p2_shape_grad(l, sp.tri_grad_lambda(t), c.dN);
      Vec2 grad = Vec2::Zero();
      for (int i = 0; i < 6; ++i) grad += w_ref.coeffs[c.dofs[i]] * c.dN[i];
      const Eigen::Matrix2d H = f_eps_hess(grad, rp);
      const double fe = f_eps(grad, rp);
      const Vec2 conv = (1.0 / rp.k) * std::pow(fe, -1.0 - 1.0 / rp.k) * (grad / fe);
      const double wgt = quad.weights[q] * area;
      for (int j = 0; j < 6; ++j) {
        const Vec2 Hdj = H * c.dN[j];
        const double cj = conv.dot(c.dN[j]);
        for (int i = 0; i < 6; ++i) Ke(i, j) += wgt * (Hdj.dot(c.dN[i]) + cj * c.N[i]);
      }
    }
    for (int i = 0; i < 6; ++i) {
      const int row = sp.interior_index()[c.dofs[i]];
      if (row < 0) continue;
      for (int j = 0; j < 6; ++j) {
        const int col = sp.interior_index()[c.dofs[j]];
        if (col < 0) continue;
        trip.emplace_back(row, col, Ke(i, j));
      }
    }
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

Eigen::VectorXd assemble_load(const P2Space& sp, const std::function<double(const Vec2&)>& cfun) {
  const auto& quad = TriQuadrature::get();
  const TriMesh& m = sp.mesh();
  Eigen::VectorXd L = Eigen::VectorXd::Zero(static_cast<int>(sp.interior_dofs().size()));
  CellScratch c;
  for (int t = 0; t < m.n_triangles(); ++t) {
    c.dofs = sp.cell_dofs(t);
    const auto& tri = m.triangles[t];
    const double area = sp.tri_area(t);
    for (int q = 0; q < TriQuadrature::n_points; ++q) {
      const auto& l = quad.bary[q];
      p2_shape(l, c.N);
      const Vec2 p = l[0] * m.vertices[tri[0]] + l[1] * m.vertices[tri[1]] + l[2] * m.vertices[tri[2]];
      const double wgt = quad.weights[q] * area * cfun(p);
      for (int i = 0; i < 6; ++i) {
        const int row = sp.interior_index()[c.dofs[i]];
        if (row >= 0) L[row] += wgt * c.N[i];
      }
    }
  }
  return L;
}

Eigen::SparseMatrix<double> assemble_laplace_stiffness(const P2Space& sp) {
  const auto& quad = TriQuadrature::get();
  const int n = static_cast<int>(sp.interior_dofs().size());
  std::vector<Eigen::Triplet<double>> trip;
  CellScratch c;
  for (int t = 0; t < sp.mesh().n_triangles(); ++t) {
    c.dofs = sp.cell_dofs(t);
    const double area = sp.tri_area(t);
    Eigen::Matrix<double, 6, 6> Ke = Eigen::Matrix<double, 6, 6>::Zero();
    for (int q = 0; q < TriQuadrature::n_points; ++q) {
      p2_shape_grad(quad.bary[q], sp.tri_grad_lambda(t), c.dN);
      const double wgt = quad.weights[q] * area;
      for (int j = 0; j < 6; ++j)
        for (int i = 0; i < 6; ++i) Ke(i, j) += wgt * c.dN[j].dot(c.dN[i]);
    }
    for (int i = 0; i < 6; ++i) {
      const int row = sp.interior_index()[c.dofs[i]];
      if (row < 0) continue;
      for (int j = 0; j < 6; ++j) {
        const int col = sp.interior_index()[c.dofs[j]];
        if (col >= 0) trip.emplace_back(row, col, Ke(i, j));
      }
    }
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

void write_matrix_triplets(std::ostream& os, const Eigen::SparseMatrix<double>& A) {
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
      os << it.row() << " " << it.col() << " " << format_double(it.value()) << "\n";
}

} // namespace pmcf
