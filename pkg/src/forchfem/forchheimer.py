"""Scalar kernel of the generalized Forchheimer law.

The momentum law ``g(|v|) v = -grad p`` with ``g(s) = sum_i a_i s**alpha_i``
inverts to ``v = -K(|grad p|) grad p`` where ``K(xi) = 1 / g(s(xi))`` and
``s(xi)`` is the nonnegative root of ``s g(s) = xi``.  Everything here is a
pure function of its inputs and accepts scalars or numpy arrays for ``xi``
unless noted otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

ROOT_RTOL = 1e-13
ROOT_MAXITER = 200


class DomainError(ValueError):
    """Argument outside the domain of a kernel function."""


class RootFindingError(RuntimeError):
    """Safeguarded Newton did not reach the residual tolerance."""


@dataclass(frozen=True)
class GPolynomial:
    """Generalized polynomial ``g(s) = a_0 + a_1 s**alpha_1 + ... + a_N s**alpha_N``.

    Exponents are real, start at 0 and strictly increase; ``a_0`` and ``a_N``
    are positive and the remaining coefficients nonnegative.
    """

    exponents: tuple[float, ...]
    coefficients: tuple[float, ...]

    def __post_init__(self):
        alphas = tuple(float(x) for x in self.exponents)
        coeffs = tuple(float(x) for x in self.coefficients)
        object.__setattr__(self, "exponents", alphas)
        object.__setattr__(self, "coefficients", coeffs)
        if len(alphas) != len(coeffs):
            raise ValueError(
                f"exponents and coefficients differ in length ({len(alphas)} vs {len(coeffs)})"
            )
        if len(alphas) < 2:
            raise ValueError("g needs at least two terms (N >= 1)")
        if alphas[0] != 0.0:
            raise ValueError(f"first exponent must be 0, got {alphas[0]}")
        if any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise ValueError(f"exponents must be strictly increasing: {alphas}")
        if not all(np.isfinite(alphas)) or not all(np.isfinite(coeffs)):
            raise ValueError("exponents and coefficients must be finite")
        if coeffs[0] <= 0:
            raise ValueError(f"a_0 must be positive, got {coeffs[0]}")
        if coeffs[-1] <= 0:
            raise ValueError(f"a_N must be positive, got {coeffs[-1]}")
        if any(c < 0 for c in coeffs):
            raise ValueError(f"coefficients must be nonnegative: {coeffs}")

    @classmethod
    def from_arrays(cls, alphas: Sequence[float], coeffs: Sequence[float]) -> "GPolynomial":
        return cls(tuple(alphas), tuple(coeffs))

    @property
    def degree(self) -> float:
        return self.exponents[-1]

    @property
    def a0(self) -> float:
        return self.coefficients[0]

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        for alpha, c in zip(self.exponents, self.coefficients):
            out = out + c * s**alpha
        return out

    def deriv(self, s):
        """g'(s); the constant term is skipped so ``s = 0`` is safe when all alpha_i >= 1."""
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        with np.errstate(divide="ignore"):
            for alpha, c in zip(self.exponents[1:], self.coefficients[1:]):
                out = out + c * alpha * s ** (alpha - 1.0)
        return out

    def __str__(self):
        terms = [f"{c:g}" if a == 0 else f"{c:g}*s^{a:g}" for a, c in zip(self.exponents, self.coefficients)]
        return " + ".join(terms)


DARCY_FORCHHEIMER = GPolynomial((0.0, 1.0), (1.0, 1.0))


@dataclass(frozen=True)
class Exponents:
    a: float
    beta: float
    lam: float
    gamma: float
    degree: float
    degree_condition: bool


def _scalar_or_array(x, like):
    return float(x) if np.ndim(like) == 0 else x


def _check_nonnegative(name, x):
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise DomainError(f"{name} must be nonnegative")
    return x


def gpoly_eval(g: GPolynomial, s):
    s_arr = _check_nonnegative("s", s)
    return _scalar_or_array(g(s_arr), s)


def solve_s(g: GPolynomial, xi, rtol: float = ROOT_RTOL, maxiter: int = ROOT_MAXITER):
    """Nonnegative root ``s`` of ``s g(s) = xi``.

    Safeguarded Newton: iterates stay inside the bracket ``[0, max(1, xi/a_0)]``,
    which shrinks on every evaluation, and a Newton step leaving it is replaced
    by bisection.  Iteration runs to roundoff (relative to xi) so that K stays
    accurate for tiny xi; ``rtol`` is the contract checked at the end.
    """
    xi_arr = _check_nonnegative("xi", xi)
    if np.any(np.isinf(xi_arr)):
        raise DomainError("xi must be finite")
    x = np.atleast_1d(xi_arr).astype(float).ravel()
    tol = rtol * np.maximum(1.0, x)

    lo = np.zeros_like(x)
    hi = np.maximum(1.0, x / g.a0)
    s = x / g(x ** (1.0 / (g.degree + 1.0)))
    s = np.clip(s, lo, hi)
    s[x == 0] = 0.0

    active = x > 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for _ in range(maxiter):
            if not active.any():
                break
            idx = np.flatnonzero(active)
            si = s[idx]
            phi = si * g(si) - x[idx]
            ok = np.abs(phi) <= 4 * np.finfo(float).eps * x[idx]
            lo[idx] = np.where(phi < 0, si, lo[idx])
            hi[idx] = np.where(phi > 0, si, hi[idx])
            dphi = g(si) + si * g.deriv(si)
            step = si - phi / dphi
            outside = ~((step > lo[idx]) & (step < hi[idx]))
            step = np.where(outside, 0.5 * (lo[idx] + hi[idx]), step)
            stalled = np.abs(step - si) <= 2 * np.finfo(float).eps * si
            s[idx] = np.where(ok, si, step)
            active[idx[ok | stalled]] = False

    residual = np.abs(s * g(s) - x)
    bad = residual > tol
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise RootFindingError(
            f"s*g(s) = xi not solved for xi={x[k]:.17g}: residual {residual[k]:.3e} > {tol[k]:.3e}"
        )
    s = s.reshape(np.shape(xi_arr))
    return _scalar_or_array(s, xi)


def kfun(g: GPolynomial, xi):
    """K(xi) = 1/g(s(xi)); lies in (0, 1/a_0] and decreases in xi."""
    s = np.asarray(solve_s(g, xi))
    return _scalar_or_array(1.0 / g(s), xi)


def kfun_deriv(g: GPolynomial, xi):
    """dK/dxi from implicit differentiation of ``s g(s) = xi`` (requires xi > 0)."""
    xi_arr = np.asarray(xi, dtype=float)
    if np.any(np.isnan(xi_arr)) or np.any(xi_arr <= 0):
        raise DomainError("kfun_deriv requires xi > 0")
    s = np.asarray(solve_s(g, xi_arr))
    gs = g(s)
    gp = g.deriv(s)
    ds = 1.0 / (gs + s * gp)
    return _scalar_or_array(-gp * ds / gs**2, xi)


def kfun_and_deriv_times_xi(g: GPolynomial, xi):
    """Return ``K(xi)`` and ``K'(xi) * xi`` with the product set to 0 at ``xi = 0``.

    Used by Jacobian assembly where zero-gradient elements are common.
    """
    xi = np.asarray(xi, dtype=float)
    s = np.asarray(solve_s(g, xi))
    gs = g(s)
    k = 1.0 / gs
    kpx = np.zeros_like(xi)
    pos = xi > 0
    if pos.any():
        sp = s[pos]
        gp = g.deriv(sp)
        kpx[pos] = -gp * xi[pos] / (gs[pos] ** 2 * (gs[pos] + sp * gp))
    return k, kpx


def hfun(g: GPolynomial, xi, rtol: float = 1e-10, max_rounds: int = 60):
    """H(xi) = int_0^{xi^2} K(sqrt(u)) du, evaluated as int_0^xi 2 v K(v) dv.

    Adaptive Simpson processed breadth-first: every round evaluates K on all
    pending intervals (of all requested xi) at once, accepts the intervals
    whose Richardson error estimate is below their share of the tolerance and
    halves the rest.  The share is proportional to interval width and measured
    against the lower bound ``K(xi) xi^2`` of the result.
    """
    xi_arr = _check_nonnegative("xi", xi)
    flat = np.atleast_1d(xi_arr).astype(float).ravel()
    out = np.zeros_like(flat)

    def f(v):
        return 2.0 * v * np.asarray(kfun(g, v))

    owner = np.flatnonzero(flat > 0)
    if owner.size:
        xs = flat[owner]
        scale = np.asarray(kfun(g, xs)) * xs**2
        budget = rtol * scale / xs  # tolerance per unit width
        a = np.zeros_like(xs)
        b = xs.copy()
        fa, fb = f(a), f(b)
        m = 0.5 * (a + b)
        fm = f(m)
        for _ in range(max_rounds):
            lm = 0.5 * (a + m)
            rm = 0.5 * (m + b)
            flm, frm = f(lm), f(rm)
            w = b - a
            whole = w / 6.0 * (fa + 4.0 * fm + fb)
            halves = w / 12.0 * (fa + 4.0 * flm + 2.0 * fm + 4.0 * frm + fb)
            err = np.abs(halves - whole) / 15.0
            done = err <= budget * w
            np.add.at(out, owner[done], halves[done] + (halves[done] - whole[done]) / 15.0)
            keep = ~done
            if not keep.any():
                break
            # split surviving intervals into left and right halves
            owner = np.concatenate([owner[keep], owner[keep]])
            budget = np.concatenate([budget[keep], budget[keep]])
            a, m, b, fa, fm, fb, flm, frm = (q[keep] for q in (a, m, b, fa, fm, fb, flm, frm))
            a, b = np.concatenate([a, m]), np.concatenate([m, b])
            fa, fb = np.concatenate([fa, fm]), np.concatenate([fm, fb])
            m = np.concatenate([lm[keep], rm[keep]])
            fm = np.concatenate([flm, frm])
        else:
            raise RootFindingError("adaptive Simpson for H did not converge")
    return _scalar_or_array(out.reshape(np.shape(xi_arr)), xi)


def exponents(g: GPolynomial, d: int = 2) -> Exponents:
    if d < 2:
        raise DomainError(f"dimension must be >= 2, got {d}")
    deg = g.degree
    a = deg / (deg + 1.0)
    beta = 2.0 - a
    cond = True if d == 2 else deg <= 4.0 / (d - 2)
    return Exponents(a=a, beta=beta, lam=beta / (beta - 1.0), gamma=a / beta, degree=deg, degree_condition=cond)


def flux(g: GPolynomial, y):
    """Vector map ``y -> K(|y|) y`` for an array of 2-vectors (last axis)."""
    y = np.asarray(y, dtype=float)
    return np.asarray(kfun(g, np.linalg.norm(y, axis=-1)))[..., None] * y
