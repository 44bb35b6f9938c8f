"""Error norms, convergence rates and energy diagnostics."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .fem import _values, element_gradients
from .forchheimer import GPolynomial, exponents
from .mesh import Mesh
from .quadrature import DEGREE4, TriangleRule

CSV_HEADER = ["N", "h", "err_l2", "rate_l2", "err_gradbeta", "rate_gradbeta", "err_linf"]


def _field_at(mesh: Mesh, u, bary):
    """P1 field values at barycentric points of every element, shape ``(nt, q)``."""
    return _values(u, mesh)[mesh.triangles] @ np.asarray(bary).T


def error_l2(mesh: Mesh, u, exact, t: float, rule: TriangleRule = DEGREE4) -> float:
    corners = mesh.vertices[mesh.triangles]
    diff = _field_at(mesh, u, rule.bary) - exact(rule.points(corners), t)
    return float(np.sqrt(np.sum(mesh.areas * (diff**2 @ rule.weights))))


def error_grad_lbeta(mesh: Mesh, u, exact_grad, t: float, beta: float,
                     rule: TriangleRule = DEGREE4) -> float:
    corners = mesh.vertices[mesh.triangles]
    gh = element_gradients(mesh, u)[:, None, :]
    diff = np.linalg.norm(gh - exact_grad(rule.points(corners), t), axis=-1)
    return float(np.sum(mesh.areas * (diff**beta @ rule.weights)) ** (1.0 / beta))


def _lattice(order: int = 3) -> np.ndarray:
    pts = [(i, j, order - i - j) for i in range(order + 1) for j in range(order + 1 - i)]
    return np.array(pts, dtype=float) / order


LINF_SAMPLES = _lattice(3)


def error_linf(mesh: Mesh, u, exact, t: float) -> float:
    """Approximate sup-norm error from a barycentric lattice of 10 points per element."""
    corners = mesh.vertices[mesh.triangles]
    pts = np.einsum("qk,ekd->eqd", LINF_SAMPLES, corners)
    return float(np.max(np.abs(_field_at(mesh, u, LINF_SAMPLES) - exact(pts, t))))


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    h: float
    err_l2: float
    rate_l2: Optional[float]
    err_grad_lbeta: float
    rate_grad: Optional[float]
    err_linf: float


def rate(err_prev: float, err_cur: float) -> float:
    return math.log2(err_prev / err_cur)


def convergence_table(rows: Iterable[Sequence]) -> list[ConvergenceRow]:
    """Rows of ``(N, err_l2, err_grad_lbeta, err_linf)`` with N doubling each time."""
    out: list[ConvergenceRow] = []
    prev = None
    for N, e2, eg, einf in rows:
        if prev is not None and N != 2 * prev.N:
            raise ValueError(f"N must double between rows: {prev.N} -> {N}")
        out.append(ConvergenceRow(
            N=int(N), h=1.0 / N, err_l2=float(e2),
            rate_l2=None if prev is None else rate(prev.err_l2, e2),
            err_grad_lbeta=float(eg),
            rate_grad=None if prev is None else rate(prev.err_grad_lbeta, eg),
            err_linf=float(einf),
        ))
        prev = out[-1]
    return out


def check_doubling(Ns: Sequence[int]) -> None:
    if not Ns:
        raise ValueError("N list is empty")
    for a, b in zip(Ns, Ns[1:]):
        if b != 2 * a:
            raise ValueError(f"N list must double at each level, got {list(Ns)}")


def _g6(x) -> str:
    return "" if x is None else f"{x:.6g}"


def write_csv(rows: Iterable[ConvergenceRow], stream=None) -> str:
    buf = io.StringIO() if stream is None else stream
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.N, _g6(r.h), _g6(r.err_l2), _g6(r.rate_l2), _g6(r.err_grad_lbeta),
                    _g6(r.rate_grad), _g6(r.err_linf)])
    return buf.getvalue() if stream is None else ""


def format_table(rows: Sequence[ConvergenceRow]) -> str:
    """Human-readable layout in the style of E-notation convergence tables."""
    lines = [f"{'N':>5} {'||e||_L2':>11} {'rate':>7} {'||grad e||_beta':>16} {'rate':>7} {'||e||_inf':>11}"]
    for r in rows:
        rl = "-" if r.rate_l2 is None else f"{r.rate_l2:.3f}"
        rg = "-" if r.rate_grad is None else f"{r.rate_grad:.3f}"
        lines.append(f"{r.N:>5} {r.err_l2:>11.3E} {rl:>7} {r.err_grad_lbeta:>16.3E} {rg:>7} {r.err_linf:>11.3E}")
    return "\n".join(lines)


def energy_diagnostics(traj, g: GPolynomial) -> dict[str, np.ndarray]:
    """Per-step gradient L^beta norm, omega_h = (1 + ||grad rho_h||_beta)^(-a) and interior L2 norm."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    a = exponents(g).a
    grad = np.asarray(traj.grad_norms, dtype=float)
    return {
        "time": np.asarray(traj.times, dtype=float),
        "grad_lbeta": grad,
        "omega": (1.0 + grad) ** (-a),
        "l2": np.asarray(traj.l2_norms, dtype=float),
    }
