"""Independent reference computations used by the tests.

Nothing here calls the code paths it is used to check.
"""
import numpy as np


def k_closed_form(xi):
    """K for g(s) = 1 + s."""
    return 2.0 / (1.0 + np.sqrt(1.0 + 4.0 * np.asarray(xi, dtype=float)))


def dk_closed_form(xi):
    r = np.sqrt(1.0 + 4.0 * np.asarray(xi, dtype=float))
    return -4.0 / (r * (1.0 + r) ** 2)


def h_closed_form(alphas, coeffs, s):
    """H(xi) written in terms of s = s(xi): sum 2 a_i (1 + alpha_i)/(alpha_i + 2) s^(alpha_i + 2)."""
    return sum(2 * c * (1 + a) / (a + 2) * s ** (a + 2) for a, c in zip(alphas, coeffs))


def composite_simpson(f, a, b, panels):
    x = np.linspace(a, b, 2 * panels + 1)
    y = f(x)
    h = (b - a) / (2 * panels)
    return h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())


def _d1(fun, x, axis, h):
    """Fourth-order central difference of ``fun`` along coordinate ``axis``."""
    e = np.zeros(2)
    e[axis] = h
    return (-fun(x + 2 * e) + 8 * fun(x + e) - 8 * fun(x - e) + fun(x - 2 * e)) / (12 * h)


def pde_residual(exact, forcing, x, t, kappa=k_closed_form, h=1e-3):
    """``f - (rho_t - div(K(|grad rho|) grad rho))`` from finite differences of ``exact`` alone."""
    x = np.asarray(x, dtype=float)

    def rho_t(tt):
        return exact(x, tt)

    dt = (-rho_t(t + 2 * h) + 8 * rho_t(t + h) - 8 * rho_t(t - h) + rho_t(t - 2 * h)) / (12 * h)

    def grad(p):
        return np.array([_d1(lambda q: exact(q, t), p, d, h) for d in range(2)])

    def flux(p, d):
        gr = grad(p)
        return kappa(np.linalg.norm(gr)) * gr[d]

    div = sum(_d1(lambda q, d=d: flux(q, d), x, d, h) for d in range(2))
    return float(forcing(x, t)) - (dt - div)


def fd_jacobian_action(op, u, v, eps=1e-6):
    return (op(u + eps * v) - op(u - eps * v)) / (2 * eps)


def p1_evaluate(N, u, x):
    """Evaluate a P1 field on ``unit_square_mesh(N)`` at points ``x`` (..., 2), by cell lookup."""
    x = np.asarray(x, dtype=float)
    shape = x.shape[:-1]
    x = x.reshape(-1, 2)
    i = np.minimum((x[:, 0] * N).astype(int), N - 1)
    j = np.minimum((x[:, 1] * N).astype(int), N - 1)
    fx, fy = x[:, 0] * N - i, x[:, 1] * N - j
    v00 = j * (N + 1) + i
    u00, u10, u01, u11 = u[v00], u[v00 + 1], u[v00 + N + 1], u[v00 + N + 2]
    lower = u00 + fx * (u10 - u00) + fy * (u11 - u10)
    upper = u00 + fx * (u11 - u01) + fy * (u01 - u00)
    return np.where(fx >= fy, lower, upper).reshape(shape)
