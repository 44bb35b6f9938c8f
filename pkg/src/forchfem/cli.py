"""Command-line front end.

    forchfem convergence --example 1 --N 4,8,16 --T 1 --dt 0.015625 --out table.csv
    forchfem stability --example homogeneous --N 16 --dt 0.05 --T 20 --out norms.csv
    forchfem single --example 2 --N 32

Exit status: 0 success, 1 solver failure (partial CSV ends with a ``# FAILED`` line),
2 invalid arguments or config, 3 norm increase detected in a homogeneous stability run.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import analysis
from .forchheimer import exponents
from .linalg import LinearSolverError
from .mesh import unit_square_mesh
from .problems import ProblemValidationError, load_problem, parse_config
from .solver import NonlinearSolverError, TimeSteppingConfig, run_transient

log = logging.getLogger("forchfem")

EXIT_OK, EXIT_SOLVER, EXIT_USAGE, EXIT_MONOTONE = 0, 1, 2, 3
MONOTONE_RTOL = 1e-12


@dataclass
class RunSpec:
    mode: str
    problem_config: dict
    N_list: list
    dt: Optional[float]
    T: Optional[float]
    scheme: str = "picard"
    output: Optional[str] = None
    threads: int = 1
    random_init: bool = False
    seed: int = 0
    max_nonlinear_iters: int = 50

    def validate(self):
        if not self.N_list:
            raise ValueError("N list is empty")
        if any(int(n) != n or n < 1 for n in self.N_list):
            raise ValueError(f"N values must be positive integers: {self.N_list}")
        if self.mode == "convergence":
            analysis.check_doubling(self.N_list)
        if self.threads < 1:
            raise ValueError("--threads must be >= 1")

    def problem(self):
        return load_problem(self.problem_config)

    def config(self, problem) -> TimeSteppingConfig:
        T = self.T if self.T is not None else problem.t_end
        dt = self.dt if self.dt is not None else 0.25 / max(self.N_list)
        cfg = TimeSteppingConfig(dt=dt, t_end=T, scheme=self.scheme,
                                 max_nonlinear_iters=self.max_nonlinear_iters)
        cfg.n_steps  # raises on misaligned t_end/dt
        return cfg


def _parse_N(text) -> list:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    if isinstance(text, int):
        return [text]
    return [int(v) for v in str(text).replace(" ", "").split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--example", default=None, help="1, 2 or homogeneous")
    common.add_argument("--N", default=None, help="comma-separated mesh subdivisions")
    common.add_argument("--dt", type=float, default=None)
    common.add_argument("--T", type=float, default=None)
    common.add_argument("--scheme", choices=["picard", "newton"], default=None)
    common.add_argument("--out", default=None, help="CSV output path")
    common.add_argument("--config", default=None, help="flat key = value file; its values override flags")
    common.add_argument("--threads", type=int, default=None, help="parallel N levels (processes)")
    common.add_argument("--random-init", action="store_true",
                        help="stability mode: random interior initial field instead of the problem's")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="forchfem", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="mode", required=True)
    sub.add_parser("convergence", parents=[common], help="refinement study against an exact solution")
    sub.add_parser("stability", parents=[common], help="per-step norm histories")
    sub.add_parser("single", parents=[common], help="one run per N, errors printed")
    return parser


def spec_from_args(args) -> RunSpec:
    cfg = {}
    if args.config:
        cfg = parse_config(Path(args.config).read_text())

    def pick(key, flag, default):
        if key in cfg:
            return cfg[key]
        return flag if flag is not None else default

    default_example = "homogeneous" if args.mode == "stability" else "1"
    problem_cfg = {"example": str(pick("example", args.example, default_example))}
    for key in ("alphas", "coeffs", "initial"):
        if key in cfg:
            problem_cfg[key] = cfg[key]
    T = pick("T", args.T, None)
    if T is not None:
        problem_cfg["T"] = float(T)
    default_N = "16" if args.mode != "convergence" else "4,8,16,32"
    dt = pick("dt", args.dt, None)
    return RunSpec(
        mode=args.mode,
        problem_config=problem_cfg,
        N_list=_parse_N(pick("N_list", args.N, default_N)),
        dt=None if dt is None else float(dt),
        T=None if T is None else float(T),
        scheme=str(pick("scheme", args.scheme, "picard")),
        output=pick("output", args.out, None),
        threads=int(pick("threads", args.threads, 1)),
        random_init=bool(pick("random_init", args.random_init, False)),
        seed=int(pick("seed", args.seed, 0)),
        max_nonlinear_iters=int(cfg.get("max_nonlinear_iters", 50)),
    )


def solve_level(spec: RunSpec, N: int):
    """Run one refinement level; returns (N, err_l2, err_grad, err_linf, max_iters)."""
    problem = spec.problem()
    cfg = spec.config(problem)
    mesh = unit_square_mesh(N)
    traj = run_transient(mesh, problem, cfg, keep_fields=False)
    u, T = traj.final.values, cfg.t_end
    beta = exponents(problem.g).beta
    return (
        N,
        analysis.error_l2(mesh, u, problem.exact, T),
        analysis.error_grad_lbeta(mesh, u, problem.exact_grad, T, beta),
        analysis.error_linf(mesh, u, problem.exact, T),
        max(traj.iterations),
    )


def _run_levels(spec: RunSpec):
    """Yield level results in N order; stops at the first failure."""
    if spec.threads > 1 and len(spec.N_list) > 1:
        with ProcessPoolExecutor(max_workers=spec.threads) as pool:
            futures = [pool.submit(solve_level, spec, N) for N in spec.N_list]
            for fut in futures:
                yield fut.result()
    else:
        for N in spec.N_list:
            yield solve_level(spec, N)


def _emit(text: str, path: Optional[str]):
    if path:
        Path(path).write_text(text)


def cmd_convergence(spec: RunSpec, stdout=None) -> int:
    stdout = stdout or sys.stdout
    problem = spec.problem()
    if problem.exact is None:
        raise ValueError(f"problem {problem.name} has no exact solution; convergence mode needs one")
    cfg = spec.config(problem)
    print(f"# {problem.name}: T={cfg.t_end:g} dt={cfg.dt:g} scheme={cfg.scheme}", file=stdout)
    results, failure = [], None
    try:
        for res in _run_levels(spec):
            results.append(res)
            log.info("N=%d done (max %d nonlinear iterations)", res[0], res[4])
    except (NonlinearSolverError, LinearSolverError) as exc:
        failure = f"# FAILED at N={spec.N_list[len(results)]}: {exc}"
    rows = analysis.convergence_table([r[:4] for r in results])
    text = analysis.write_csv(rows)
    if failure:
        text += failure + "\n"
    _emit(text, spec.output)
    print(analysis.format_table(rows), file=stdout)
    if failure:
        print(failure, file=stdout)
        return EXIT_SOLVER
    return EXIT_OK


STABILITY_HEADER = ["N", "step", "t", "l2_norm", "grad_lbeta", "omega", "iterations", "err_l2"]


def random_interior_field(mesh, seed: int):
    rng = np.random.default_rng(seed)
    u = rng.uniform(-1.0, 1.0, mesh.n_vertices)
    u[mesh.boundary_mask] = 0.0
    return u


def cmd_stability(spec: RunSpec, stdout=None) -> int:
    stdout = stdout or sys.stdout
    problem = spec.problem()
    cfg = spec.config(problem)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(STABILITY_HEADER)
    status = EXIT_OK
    for N in spec.N_list:
        mesh = unit_square_mesh(N)
        u0 = random_interior_field(mesh, spec.seed) if spec.random_init else None
        try:
            traj = run_transient(mesh, problem, cfg, u0=u0, keep_fields=problem.exact is not None)
        except (NonlinearSolverError, LinearSolverError) as exc:
            buf.write(f"# FAILED at N={N}: {exc}\n")
            _emit(buf.getvalue(), spec.output)
            print(f"# FAILED at N={N}: {exc}", file=stdout)
            return EXIT_SOLVER
        diag = analysis.energy_diagnostics(traj, problem.g)
        for k, t in enumerate(traj.times):
            err = ""
            if problem.exact is not None:
                err = f"{analysis.error_l2(mesh, traj.fields[k], problem.exact, t):.6g}"
            w.writerow([N, k, f"{t:.6g}", f"{diag['l2'][k]:.6g}", f"{diag['grad_lbeta'][k]:.6g}",
                        f"{diag['omega'][k]:.6g}", traj.iterations[k], err])
        l2 = diag["l2"]
        increases = np.flatnonzero(l2[1:] > l2[:-1] * (1 + MONOTONE_RTOL))
        print(f"N={N}: {len(l2) - 1} steps, L2 norm {l2[0]:.3e} -> {l2[-1]:.3e}", file=stdout)
        if problem.homogeneous and increases.size:
            print(f"N={N}: L2 norm increased at step {increases[0] + 1}", file=stdout)
            status = EXIT_MONOTONE
    _emit(buf.getvalue(), spec.output)
    return status


def cmd_single(spec: RunSpec, stdout=None) -> int:
    stdout = stdout or sys.stdout
    problem = spec.problem()
    cfg = spec.config(problem)
    for N in spec.N_list:
        mesh = unit_square_mesh(N)
        try:
            traj = run_transient(mesh, problem, cfg, keep_fields=False)
        except (NonlinearSolverError, LinearSolverError) as exc:
            print(f"# FAILED at N={N}: {exc}", file=stdout)
            return EXIT_SOLVER
        line = f"N={N} T={cfg.t_end:g} dt={cfg.dt:g} max_iters={max(traj.iterations)} " \
               f"l2_norm={traj.l2_norms[-1]:.6e}"
        if problem.exact is not None:
            u = traj.final.values
            line += f" err_l2={analysis.error_l2(mesh, u, problem.exact, cfg.t_end):.6e}"
        print(line, file=stdout)
    return EXIT_OK


COMMANDS = {"convergence": cmd_convergence, "stability": cmd_stability, "single": cmd_single}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = spec_from_args(args)
        spec.validate()
        spec.config(spec.problem())
    except (ValueError, ProblemValidationError, OSError) as exc:
        print(f"forchfem: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[spec.mode](spec)
    except ValueError as exc:
        print(f"forchfem: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
