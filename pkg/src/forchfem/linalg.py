"""Jacobi-preconditioned conjugate gradients on CSR matrices."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp


class LinearSolverError(RuntimeError):
    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


def cg_solve(A, b, tol=1e-12, x0=None, maxiter=None, return_info=False):
    """Solve the SPD system ``A x = b`` to relative residual ``||b - A x|| / ||b|| <= tol``.

    ``maxiter`` defaults to ``10 n``.  Raises LinearSolverError with the final
    residual when the cap is reached.
    """
    A = sp.csr_matrix(A) if not sp.issparse(A) else A.tocsr()
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"matrix shape {A.shape} does not match rhs length {n}")
    if maxiter is None:
        maxiter = 10 * max(n, 1)

    bnorm = np.linalg.norm(b)
    if n == 0 or bnorm == 0.0:
        x = np.zeros(n)
        return (x, 0) if return_info else x

    diag = A.diagonal()
    if np.any(diag <= 0):
        raise LinearSolverError("nonpositive diagonal entry; matrix is not SPD")
    inv_diag = 1.0 / diag

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    r = b - A @ x
    target = tol * bnorm
    rnorm = np.linalg.norm(r)
    if rnorm <= target:
        return (x, 0) if return_info else x
    z = inv_diag * r
    p = z.copy()
    rz = r @ z
    for it in range(1, maxiter + 1):
        Ap = A @ p
        pAp = p @ Ap
        if pAp <= 0:
            raise LinearSolverError("matrix is not positive definite", rnorm / bnorm, it)
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        rnorm = np.linalg.norm(r)
        if rnorm <= target:
            # recursive residual can drift from the true one; confirm before returning
            true_r = np.linalg.norm(b - A @ x)
            if true_r <= target:
                return (x, it) if return_info else x
            r = b - A @ x
        z = inv_diag * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise LinearSolverError(
        f"CG did not converge in {maxiter} iterations: relative residual {rnorm / bnorm:.3e} > {tol:.1e}",
        rnorm / bnorm,
        maxiter,
    )
