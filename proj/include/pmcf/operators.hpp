#pragma once

#include "pmcf/fe_space.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace pmcf {

/// Regularization parameters: f_eps(z) = sqrt(|z|^2 + eps^2) and the
/// curvature power k > 1.
struct RegParams {
  double epsilon = 0.25;
  double k = 2.0;
  void validate() const;
};

double f_eps(const Vec2& z, const RegParams& rp);
Vec2 f_eps_grad(const Vec2& z, const RegParams& rp);
Eigen::Matrix2d f_eps_hess(const Vec2& z, const RegParams& rp);

/// Exact eigenvalues of the f_eps Hessian: eps^2/|z|_eps^3 along z and
/// 1/|z|_eps orthogonal to z. Returned as (min, max).
std::pair<double, double> hessian_eigen_bounds(const Vec2& z, const RegParams& rp);

/// Extreme a^ij eigenvalues over the quadrature points of a mesh at a given
/// gradient field, with ratio lambda_max/lambda_min.
struct EllipticityReport {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double ratio() const { return lambda_max / lambda_min; }
};
EllipticityReport ellipticity_report(const FeFunction& w, const RegParams& rp);

/// Residual of the discrete weak form over interior dofs:
///   R[i] = int <Dw, Dphi_i>/f_eps(Dw) - int f_eps(Dw)^(-1/k) phi_i.
Eigen::VectorXd assemble_residual(const FeFunction& w, const RegParams& rp);

/// Jacobian of assemble_residual at w_ref (the linearized operator L_eps
/// frozen at w_ref): diffusion with the f_eps Hessian plus the nonsymmetric
/// convection term (1/k) f_eps^(-1-1/k) <f_eps_grad, Dphi_j> phi_i.
Eigen::SparseMatrix<double> assemble_linearized(const FeFunction& w_ref, const RegParams& rp);

/// Load vector int c(x) phi_i over interior dofs (shares the assembly
/// quadrature; used for linear-regime cross checks).
Eigen::VectorXd assemble_load(const P2Space& space,
                              const std::function<double(const Vec2&)>& c);

/// Stiffness matrix int <Dphi_j, Dphi_i> over interior dofs.
Eigen::SparseMatrix<double> assemble_laplace_stiffness(const P2Space& space);

/// Coordinate-format ASCII dump: "row col value" per nonzero.
void write_matrix_triplets(std::ostream& os, const Eigen::SparseMatrix<double>& A);

} // namespace pmcf
