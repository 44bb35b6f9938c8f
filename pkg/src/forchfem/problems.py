"""Manufactured and homogeneous test problems on the unit square.

Functions of space take ``x`` with shape ``(..., 2)``; space-time functions
take ``(x, t)``.
"""
from __future__ import annotations

import ast
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .forchheimer import DARCY_FORCHHEIMER, GPolynomial

CONSISTENCY_TOL = 1e-12


class ProblemValidationError(ValueError):
    pass


def _zero(x, t=0.0):
    return np.zeros(np.shape(x)[:-1])


@dataclass(frozen=True)
class Problem:
    name: str
    g: GPolynomial
    forcing: Callable
    boundary: Callable
    initial: Callable
    exact: Optional[Callable] = None
    exact_grad: Optional[Callable] = None
    t_end: float = 1.0
    homogeneous: bool = False

    def __post_init__(self):
        if self.exact is not None:
            validate(self)


def _boundary_samples(rng, n):
    s = rng.uniform(0.0, 1.0, n)
    side = rng.integers(0, 4, n)
    x = np.where(side == 0, 0.0, np.where(side == 1, 1.0, s))
    y = np.where(side == 2, 0.0, np.where(side == 3, 1.0, s))
    return np.column_stack([x, y])


def validate(problem: Problem, n: int = 100, seed: int = 0) -> None:
    """Check that boundary and initial data are the trace/restriction of the exact solution."""
    rng = np.random.default_rng(seed)
    pts = _boundary_samples(rng, n)
    times = rng.uniform(0.0, max(problem.t_end, 1.0), n)
    for p, t in zip(pts, times):
        diff = abs(float(problem.boundary(p, t)) - float(problem.exact(p, t)))
        if diff > CONSISTENCY_TOL:
            raise ProblemValidationError(
                f"{problem.name}: boundary data differs from exact solution at x={p.tolist()}, t={t:.6g} by {diff:.3e}"
            )
    interior = rng.uniform(0.0, 1.0, (n, 2))
    for p in np.concatenate([interior, pts]):
        diff = abs(float(problem.initial(p)) - float(problem.exact(p, 0.0)))
        if diff > CONSISTENCY_TOL:
            raise ProblemValidationError(
                f"{problem.name}: initial data differs from exact solution at x={p.tolist()} by {diff:.3e}"
            )


# Example 1: rho = exp(-2t) x1(1-x1) x2(1-x2), zero boundary data.

def _ex1_exact(x, t):
    x1, x2 = x[..., 0], x[..., 1]
    return np.exp(-2.0 * t) * x1 * (1 - x1) * x2 * (1 - x2)


def _ex1_grad(x, t):
    x1, x2 = x[..., 0], x[..., 1]
    e = np.exp(-2.0 * t)
    return np.stack([e * x2 * (1 - x2) * (1 - 2 * x1), e * x1 * (1 - x1) * (1 - 2 * x2)], axis=-1)


def _ex1_forcing(x, t):
    x1 = np.asarray(x[..., 0], dtype=float)
    x2 = np.asarray(x[..., 1], dtype=float)
    p1, p2 = x1 * (1 - x1), x2 * (1 - x2)
    d1, d2 = 1 - 2 * x1, 1 - 2 * x2
    w = np.sqrt((p2 * d1) ** 2 + (p1 * d2) ** 2)
    e2, e4 = np.exp(-2.0 * t), np.exp(-4.0 * t)
    root = np.sqrt(1 + 4 * e2 * w)

    f = -2 * e2 * p1 * p2 + 4 * e2 * (p2 + p1) / (1 + root)
    br1 = 2 * x1 * (1 - x1) ** 2 * d2**2 - 2 * x1**2 * (1 - x1) * d2**2 - 4 * x2**2 * (1 - x2) ** 2 * d1
    br2 = 2 * x2 * (1 - x2) ** 2 * d1**2 - 2 * x2**2 * (1 - x2) * d1**2 - 4 * x1**2 * (1 - x1) ** 2 * d2
    num = 2 * e4 * (p2 * d1 * br1 + p1 * d2 * br2)
    den = w * root * (1 + root) ** 2
    # the quotient tends to 0 where the gradient vanishes
    safe = w > 0
    quot = np.divide(num, den, out=np.zeros(np.broadcast(num, den).shape), where=safe)
    return f + quot


def example1() -> Problem:
    return Problem(
        name="example1",
        g=DARCY_FORCHHEIMER,
        forcing=_ex1_forcing,
        boundary=_zero,
        initial=lambda x: _ex1_exact(x, 0.0),
        exact=_ex1_exact,
        exact_grad=_ex1_grad,
        t_end=1.0,
    )


# Example 2: rho = exp(1-t)(x1^2 + x2^2), nonzero boundary data.

def _ex2_exact(x, t):
    return np.exp(1.0 - t) * (x[..., 0] ** 2 + x[..., 1] ** 2)


def _ex2_grad(x, t):
    return 2.0 * np.exp(1.0 - t) * np.asarray(x, dtype=float)


def _ex2_forcing(x, t):
    z = np.asarray(x[..., 0] ** 2 + x[..., 1] ** 2, dtype=float)
    e1 = np.exp(1.0 - t)
    rz = np.sqrt(z)
    root = np.sqrt(1 + 8 * e1 * rz)
    # z / sqrt(z) written as sqrt(z) so the origin is finite
    middle = 16 * np.exp(2.0 - 2.0 * t) * rz / (root * (1 + root) ** 2)
    return -e1 * z + middle - 8 * e1 / (1 + root)


def _ex2_boundary(x, t):
    """Piecewise edge data; edges x1=0, x1=1, x2=1, x2=0 in that precedence."""
    x1 = np.asarray(x[..., 0], dtype=float)
    x2 = np.asarray(x[..., 1], dtype=float)
    val = np.where(
        x1 == 0.0, x2**2,
        np.where(x1 == 1.0, 1 + x2**2,
                 np.where(x2 == 1.0, 1 + x1**2,
                          np.where(x2 == 0.0, x1**2, np.nan))),
    )
    return np.exp(1.0 - t) * val


def example2() -> Problem:
    return Problem(
        name="example2",
        g=DARCY_FORCHHEIMER,
        forcing=_ex2_forcing,
        boundary=_ex2_boundary,
        initial=lambda x: np.e * (x[..., 0] ** 2 + x[..., 1] ** 2),
        exact=_ex2_exact,
        exact_grad=_ex2_grad,
        t_end=1.0,
    )


def homogeneous(g: GPolynomial = DARCY_FORCHHEIMER, initial: Callable | None = None, t_end: float = 1.0) -> Problem:
    """Zero forcing and zero boundary data; the solution decays to 0."""
    if initial is None:
        def initial(x):
            x1, x2 = x[..., 0], x[..., 1]
            return np.sin(np.pi * x1) * np.sin(np.pi * x2)
    return Problem(name="homogeneous", g=g, forcing=_zero, boundary=_zero, initial=initial,
                   t_end=t_end, homogeneous=True)


EXAMPLES = {"1": example1, "2": example2, "homogeneous": homogeneous}


def parse_config(text: str) -> dict:
    """Flat ``key = value`` text; ``#`` starts a comment, values are Python literals or bare words."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            out[key] = ast.literal_eval(value)
        except (ValueError, SyntaxError):
            out[key] = value.strip("\"'")
    return out


def load_problem(text: str) -> Problem:
    """Problem from config text (keys ``example``, ``T``, ``alphas``, ``coeffs``, ``initial``).

    The manufactured examples are defined for g = 1 + s only, so a custom g
    is accepted only for ``example = homogeneous``.
    """
    cfg = parse_config(text) if isinstance(text, str) else dict(text)
    key = str(cfg.get("example", "1"))
    if key not in EXAMPLES:
        raise ProblemValidationError(f"unknown example {key!r}; choose from {sorted(EXAMPLES)}")
    g = None
    if "alphas" in cfg or "coeffs" in cfg:
        if "alphas" not in cfg or "coeffs" not in cfg:
            raise ProblemValidationError("alphas and coeffs must be given together")
        try:
            g = GPolynomial.from_arrays(cfg["alphas"], cfg["coeffs"])
        except ValueError as exc:
            raise ProblemValidationError(f"invalid g: {exc}") from exc
    if key == "homogeneous":
        init = str(cfg.get("initial", "sine"))
        if init not in ("sine", "zero"):
            raise ProblemValidationError(f"initial must be 'sine' or 'zero', got {init!r}")
        problem = homogeneous(g or DARCY_FORCHHEIMER, initial=_zero if init == "zero" else None)
    else:
        problem = EXAMPLES[key]()
        if g is not None and g != problem.g:
            raise ProblemValidationError(
                f"example {key} is manufactured for g = {problem.g}; got g = {g}"
            )
    if "T" in cfg:
        T = float(cfg["T"])
        if T <= 0:
            raise ProblemValidationError("T must be positive")
        problem = replace(problem, t_end=T)
    return problem
