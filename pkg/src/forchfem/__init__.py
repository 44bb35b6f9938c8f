"""Galerkin P1 finite elements for generalized Forchheimer flow of slightly compressible fluids."""

from .forchheimer import (
    DARCY_FORCHHEIMER,
    DomainError,
    Exponents,
    GPolynomial,
    RootFindingError,
    exponents,
    gpoly_eval,
    hfun,
    kfun,
    kfun_deriv,
    solve_s,
)
from .mesh import Mesh, element_geometry, unit_square_mesh
from .fem import (
    ScalarField,
    apply_dirichlet,
    assemble_jacobian,
    assemble_load,
    assemble_mass,
    assemble_stiffness,
    l2_project,
    residual,
)
from .linalg import LinearSolverError, cg_solve
from .problems import Problem, example1, example2, homogeneous, load_problem
from .solver import (
    NonlinearSolverError,
    TimeSteppingConfig,
    Trajectory,
    backward_euler_step,
    run_transient,
)
from .analysis import (
    ConvergenceRow,
    convergence_table,
    energy_diagnostics,
    error_grad_lbeta,
    error_l2,
    error_linf,
)

__version__ = "0.1.0"
