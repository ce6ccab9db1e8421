"""Finite-element lab for the regularized level-set power mean curvature flow."""

from ._pmcf import (  # noqa: F401
    CouplingParams,
    DomainGeometry,
    FeFunction,
    P2Space,
    RadialProfile,
    RateExponents,
    RegParams,
    TriMesh,
    assemble_residual,
    beta_exponents,
    boundary_correct,
    build_mesh,
    contraction_probe,
    coupled_mesh_size,
    eoc,
    exact_disk_arrival_time,
    f_eps,
    f_eps_grad,
    f_eps_hess,
    hessian_eigen_bounds,
    holder_seminorm,
    interpolate,
    make_p2_space,
    min_angle_deg,
    norm_C0,
    norm_H1mu,
    norm_Lq,
    optimize_rate,
    radial_regularized_solve,
    run_epsilon_study,
    sandwich_constant,
    solve_disk,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
