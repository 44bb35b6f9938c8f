import numpy as np
import pytest
import scipy.sparse as sp

from forchfem.fem import assemble_mass
from forchfem.linalg import LinearSolverError, cg_solve
from forchfem.mesh import unit_square_mesh


def test_identity_one_iteration(rng):
    b = rng.normal(size=20)
    x, its = cg_solve(sp.identity(20, format="csr"), b, return_info=True)
    assert np.allclose(x, b)
    assert its == 1


def test_two_by_two():
    x = cg_solve(sp.csr_matrix([[4.0, 1.0], [1.0, 3.0]]), np.array([1.0, 2.0]))
    assert np.allclose(x, [1 / 11, 7 / 11], rtol=1e-12)


def test_mass_solve_iteration_count(rng):
    M = assemble_mass(unit_square_mesh(16))
    b = rng.normal(size=M.shape[0])
    x, its = cg_solve(M, b, tol=1e-12, return_info=True)
    assert np.linalg.norm(M @ x - b) <= 1e-12 * np.linalg.norm(b)
    assert its < 200


def test_zero_rhs_and_empty():
    assert np.array_equal(cg_solve(sp.identity(3, format="csr"), np.zeros(3)), np.zeros(3))
    assert cg_solve(sp.csr_matrix((0, 0)), np.zeros(0)).shape == (0,)


def test_cap_reports_residual(rng):
    n = 50
    A = sp.csr_matrix(np.diag(np.linspace(1, 1e6, n)) + np.ones((n, n)))
    with pytest.raises(LinearSolverError) as exc:
        cg_solve(A, rng.normal(size=n), tol=1e-14, maxiter=2)
    assert exc.value.residual > 1e-14
    assert exc.value.iterations == 2


def test_indefinite_rejected():
    with pytest.raises(LinearSolverError):
        cg_solve(sp.csr_matrix([[1.0, 0.0], [0.0, -1.0]]), np.ones(2))


def test_matches_dense_solve(rng):
    n = 30
    B = rng.normal(size=(n, n))
    A = B @ B.T + n * np.eye(n)
    b = rng.normal(size=n)
    assert np.allclose(cg_solve(sp.csr_matrix(A), b), np.linalg.solve(A, b), rtol=1e-9)
