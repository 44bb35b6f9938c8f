"""Backward-Euler time stepping with Picard or Newton inner iterations."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from .fem import (
    ScalarField,
    _values,
    apply_dirichlet,
    assemble_jacobian,
    assemble_load,
    assemble_mass,
    assemble_stiffness,
    element_gradients,
    l2_project,
)
from .forchheimer import exponents
from .linalg import LinearSolverError, cg_solve  # noqa: F401  (re-exported)
from .mesh import Mesh
from .problems import Problem

log = logging.getLogger(__name__)


class NonlinearSolverError(RuntimeError):
    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


@dataclass(frozen=True)
class TimeSteppingConfig:
    dt: float
    t_end: float
    nonlinear_tol: float = 1e-10
    max_nonlinear_iters: int = 50
    linear_tol: float = 1e-12
    scheme: Literal["picard", "newton"] = "picard"

    def __post_init__(self):
        if not self.dt > 0 or not self.t_end > 0:
            raise ValueError("dt and t_end must be positive")
        if self.dt > self.t_end * (1 + 1e-12):
            raise ValueError(f"dt={self.dt} exceeds t_end={self.t_end}")
        if not (self.nonlinear_tol > 0 and self.linear_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.scheme not in ("picard", "newton"):
            raise ValueError(f"unknown scheme {self.scheme!r}")

    @property
    def n_steps(self) -> int:
        ratio = self.t_end / self.dt
        n = round(ratio)
        if n < 1 or abs(ratio - n) > 8 * np.finfo(float).eps * max(ratio, 1.0):
            raise ValueError(f"t_end/dt = {ratio!r} is not an integer number of steps")
        return n


def grad_lbeta_norm(mesh: Mesh, u, beta: float) -> float:
    q = np.linalg.norm(element_gradients(mesh, u), axis=1)
    return float(np.sum(mesh.areas * q**beta) ** (1.0 / beta))


def mass_norm(M, v) -> float:
    return float(np.sqrt(max(v @ (M @ v), 0.0)))


class Stepper:
    """Holds the mass matrix and boundary bookkeeping for one (mesh, problem) pair."""

    def __init__(self, mesh: Mesh, problem: Problem, cfg: TimeSteppingConfig):
        self.mesh = mesh
        self.problem = problem
        self.cfg = cfg
        self.M = assemble_mass(mesh)
        self.bnodes = mesh.boundary_nodes
        self.free = mesh.free_nodes
        self.bpoints = mesh.vertices[self.bnodes]
        self.last_iterations = 0

    def boundary_values(self, t):
        vals = np.asarray(self.problem.boundary(self.bpoints, t), dtype=float)
        return np.broadcast_to(vals, self.bnodes.shape)

    def residual(self, prev, u, dt, load):
        """Full-length backward-Euler residual (boundary rows included)."""
        return self.M @ (u - prev) / dt + assemble_stiffness(self.mesh, u, self.problem.g) @ u - load

    def step(self, state: ScalarField, t_next: float) -> ScalarField:
        cfg = self.cfg
        dt = t_next - state.time
        if dt <= 0:
            raise ValueError(f"t_next={t_next} does not advance state time {state.time}")
        prev = _values(state, self.mesh)
        bvals = self.boundary_values(t_next)
        load = assemble_load(self.mesh, self.problem.forcing, t_next)
        rhs = self.M @ prev / dt + load
        Mdt = self.M / dt

        u = prev.copy()
        u[self.bnodes] = bvals
        bc = (self.bnodes, bvals)
        for k in range(1, cfg.max_nonlinear_iters + 1):
            if cfg.scheme == "picard":
                A = Mdt + assemble_stiffness(self.mesh, u, self.problem.g)
                sys = apply_dirichlet(A, rhs, bc)
                x = cg_solve(sys.A, sys.b, tol=cfg.linear_tol, x0=u[self.free])
                u_new = sys.expand(x)
            else:
                J = Mdt + assemble_jacobian(self.mesh, self.problem.g, u)
                r = self.residual(prev, u, dt, load)
                zero_bc = (self.bnodes, np.zeros(len(self.bnodes)))
                sys = apply_dirichlet(J, -r, zero_bc)
                delta = cg_solve(sys.A, sys.b, tol=cfg.linear_tol)
                u_new = u + sys.expand(delta)
            inc = mass_norm(self.M, u_new - u)
            u = u_new
            if inc <= cfg.nonlinear_tol:
                self.last_iterations = k
                return ScalarField(u, t_next)
        raise NonlinearSolverError(
            f"{cfg.scheme} iteration did not converge in {cfg.max_nonlinear_iters} iterations "
            f"at t={t_next:.6g} (last increment {inc:.3e})",
            time=t_next,
        )


def backward_euler_step(mesh: Mesh, problem: Problem, state: ScalarField, t_next: float,
                        cfg: TimeSteppingConfig) -> ScalarField:
    return Stepper(mesh, problem, cfg).step(state, t_next)


@dataclass
class Trajectory:
    times: list = field(default_factory=list)
    fields: list = field(default_factory=list)
    l2_norms: list = field(default_factory=list)
    grad_norms: list = field(default_factory=list)
    iterations: list = field(default_factory=list)
    final: Optional[ScalarField] = None

    def __len__(self):
        return len(self.times)


def initial_field(mesh: Mesh, problem: Problem) -> ScalarField:
    """L2 projection of the initial data."""
    return l2_project(mesh, lambda x, t: problem.initial(x), 0.0)


def run_transient(mesh: Mesh, problem: Problem, cfg: TimeSteppingConfig, u0=None,
                  keep_fields: bool = True) -> Trajectory:
    """March from the projected initial data (or ``u0``) to ``cfg.t_end``.

    Records per step the interior L2 norm (boundary nodes zeroed), the
    gradient L^beta norm and the nonlinear iteration count.
    """
    stepper = Stepper(mesh, problem, cfg)
    beta = exponents(problem.g).beta
    n_steps = cfg.n_steps
    state = initial_field(mesh, problem) if u0 is None else ScalarField(_values(u0, mesh).copy(), 0.0)
    traj = Trajectory()

    def record(s: ScalarField, iters: int):
        interior = s.values.copy()
        interior[stepper.bnodes] = 0.0
        traj.times.append(s.time)
        traj.l2_norms.append(mass_norm(stepper.M, interior))
        traj.grad_norms.append(grad_lbeta_norm(mesh, s.values, beta))
        traj.iterations.append(iters)
        if keep_fields:
            traj.fields.append(s.values.copy())

    record(state, 0)
    for n in range(1, n_steps + 1):
        t_next = cfg.t_end if n == n_steps else n * cfg.dt
        try:
            state = stepper.step(state, t_next)
        except (NonlinearSolverError, LinearSolverError) as exc:
            raise NonlinearSolverError(f"step failed at t={t_next:.6g}: {exc}", time=t_next) from exc
        record(state, stepper.last_iterations)
    log.debug("%s N=%d: %d steps, max %d nonlinear iterations", problem.name, mesh.N, n_steps,
              max(traj.iterations))
    traj.final = state
    return traj


def steady_solve(mesh: Mesh, problem: Problem, t: float = 0.0, tol: float = 1e-12,
                 max_iters: int = 100, linear_tol: float = 1e-13) -> ScalarField:
    """Picard iteration for ``-div(K(|grad u|) grad u) = f(., t)`` with the problem's boundary data."""
    stepper = Stepper(mesh, problem, TimeSteppingConfig(dt=1.0, t_end=1.0))
    bvals = stepper.boundary_values(t)
    load = assemble_load(mesh, problem.forcing, t)
    u = np.zeros(mesh.n_vertices)
    u[stepper.bnodes] = bvals
    for _ in range(max_iters):
        sys = apply_dirichlet(assemble_stiffness(mesh, u, problem.g), load, (stepper.bnodes, bvals))
        u_new = sys.expand(cg_solve(sys.A, sys.b, tol=linear_tol, x0=u[stepper.free]))
        inc = mass_norm(stepper.M, u_new - u)
        u = u_new
        if inc <= tol:
            return ScalarField(u, t)
    raise NonlinearSolverError(f"steady Picard iteration did not converge in {max_iters} iterations", time=t)
