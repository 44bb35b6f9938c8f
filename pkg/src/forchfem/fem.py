"""P1 Lagrange discretization on a triangle mesh.

All assembly is vectorised over elements and scattered into a CSR pattern
that is computed once per mesh.  The scatter is a ``bincount`` in fixed
element order, so repeated assemblies are bit-identical.
"""
from __future__ import annotations

import weakref
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
import scipy.sparse as sp

from .forchheimer import GPolynomial, kfun, kfun_and_deriv_times_xi
from .linalg import cg_solve
from .mesh import Mesh
from .quadrature import DEGREE4, TriangleRule

# f(x, t) with x of shape (..., 2), returning an array of shape (...)
SpaceTimeFunction = Callable[[np.ndarray, float], np.ndarray]

_LOCAL_MASS = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0


@dataclass
class ScalarField:
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)

    def __len__(self):
        return len(self.values)


def _values(w, mesh=None):
    v = w.values if isinstance(w, ScalarField) else np.asarray(w, dtype=float)
    if mesh is not None and v.shape != (mesh.n_vertices,):
        raise ValueError(f"field has shape {v.shape}, mesh has {mesh.n_vertices} vertices")
    return v


@dataclass
class _Pattern:
    indptr: np.ndarray
    indices: np.ndarray
    scatter: np.ndarray  # (nt*9,) position of each local entry in the CSR data
    n: int
    laplace_blocks: np.ndarray = field(repr=False)  # (nt, 3, 3) area * G G^T

    def build(self, local):
        data = np.bincount(self.scatter, weights=np.ravel(local), minlength=len(self.indices))
        return sp.csr_matrix((data, self.indices.copy(), self.indptr.copy()), shape=(self.n, self.n))


_patterns: "weakref.WeakKeyDictionary[Mesh, _Pattern]" = weakref.WeakKeyDictionary()


def _pattern(mesh: Mesh) -> _Pattern:
    pat = _patterns.get(mesh)
    if pat is None:
        n = mesh.n_vertices
        t = mesh.triangles
        rows = np.repeat(t, 3, axis=1).ravel()
        cols = np.tile(t, (1, 3)).ravel()
        keys, scatter = np.unique(rows * n + cols, return_inverse=True)
        indices = (keys % n).astype(np.int32)
        counts = np.bincount(keys // n, minlength=n)
        indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int32)
        G = mesh.grads
        blocks = mesh.areas[:, None, None] * np.einsum("eid,ejd->eij", G, G)
        pat = _Pattern(indptr, indices, scatter.ravel(), n, blocks)
        _patterns[mesh] = pat
    return pat


def element_gradients(mesh: Mesh, w) -> np.ndarray:
    """Constant gradient of a P1 field on each element, shape ``(nt, 2)``."""
    v = _values(w, mesh)
    return np.einsum("ek,ekd->ed", v[mesh.triangles], mesh.grads)


def assemble_mass(mesh: Mesh) -> sp.csr_matrix:
    local = mesh.areas[:, None, None] * _LOCAL_MASS
    return _pattern(mesh).build(local)


def assemble_laplacian(mesh: Mesh) -> sp.csr_matrix:
    pat = _pattern(mesh)
    return pat.build(pat.laplace_blocks)


def assemble_stiffness(mesh: Mesh, w, g: GPolynomial) -> sp.csr_matrix:
    """Picard stiffness with K frozen at the field ``w``.

    ``grad w`` is constant per element, so ``K(|grad w|)`` is too and the
    element integral is exact.
    """
    q = element_gradients(mesh, w)
    k = np.asarray(kfun(g, np.linalg.norm(q, axis=1)))
    pat = _pattern(mesh)
    return pat.build(k[:, None, None] * pat.laplace_blocks)


def assemble_jacobian(mesh: Mesh, g: GPolynomial, w) -> sp.csr_matrix:
    """Derivative of ``u -> S(u) u`` at ``w``.

    Element blocks use the tensor ``K I + K'(|q|) q q^T / |q|``; the rank-one
    part is dropped on elements with ``q = 0``.
    """
    q = element_gradients(mesh, w)
    qn = np.linalg.norm(q, axis=1)
    k, kpx = kfun_and_deriv_times_xi(g, qn)
    coef = np.zeros_like(qn)
    pos = qn > 0
    coef[pos] = kpx[pos] / qn[pos] ** 2
    G = mesh.grads
    Gq = np.einsum("eid,ed->ei", G, q)
    rank1 = coef[:, None, None] * np.einsum("ei,ej->eij", Gq, Gq) * mesh.areas[:, None, None]
    pat = _pattern(mesh)
    return pat.build(k[:, None, None] * pat.laplace_blocks + rank1)


def assemble_load(mesh: Mesh, f: SpaceTimeFunction, t: float, rule: TriangleRule = DEGREE4) -> np.ndarray:
    """Load vector ``b_i = int f(., t) phi_i``."""
    corners = mesh.vertices[mesh.triangles]
    fq = np.asarray(f(rule.points(corners), t), dtype=float)
    fq = np.broadcast_to(fq, (mesh.n_triangles, len(rule.weights)))
    local = mesh.areas[:, None] * np.einsum("eq,q,qk->ek", fq, rule.weights, rule.bary)
    return np.bincount(mesh.triangles.ravel(), weights=local.ravel(), minlength=mesh.n_vertices)


def l2_project(mesh: Mesh, w: SpaceTimeFunction, t: float = 0.0, tol: float = 1e-14) -> ScalarField:
    M = assemble_mass(mesh)
    b = assemble_load(mesh, w, t)
    return ScalarField(cg_solve(M, b, tol=tol), t)


def interpolate(mesh: Mesh, w: SpaceTimeFunction, t: float = 0.0) -> ScalarField:
    return ScalarField(np.asarray(w(mesh.vertices, t), dtype=float) * np.ones(mesh.n_vertices), t)


@dataclass
class ConstrainedSystem:
    """Linear system on the free unknowns after eliminating Dirichlet nodes."""

    A: sp.csr_matrix
    b: np.ndarray
    free: np.ndarray
    fixed: np.ndarray
    fixed_values: np.ndarray

    def expand(self, x_free) -> np.ndarray:
        n = len(self.free) + len(self.fixed)
        u = np.empty(n)
        u[self.free] = x_free
        u[self.fixed] = self.fixed_values
        return u


def apply_dirichlet(A, b, boundary_values, boundary_mask=None) -> ConstrainedSystem:
    """Symmetric elimination of prescribed nodal values.

    ``boundary_values`` maps vertex index to value, or is a pair of arrays
    ``(indices, values)``.  When ``boundary_mask`` is given every constrained
    vertex must be a boundary vertex.
    """
    A = A.tocsr()
    n = A.shape[0]
    if isinstance(boundary_values, Mapping):
        fixed = np.fromiter(boundary_values.keys(), dtype=np.int64, count=len(boundary_values))
        vals = np.fromiter(boundary_values.values(), dtype=float, count=len(boundary_values))
    else:
        fixed, vals = (np.asarray(a) for a in boundary_values)
        fixed = fixed.astype(np.int64)
        vals = np.broadcast_to(np.asarray(vals, dtype=float), fixed.shape)
    order = np.argsort(fixed)
    fixed, vals = fixed[order], vals[order]
    if fixed.size and (fixed[0] < 0 or fixed[-1] >= n):
        raise IndexError("constrained vertex index out of range")
    if boundary_mask is not None:
        interior = fixed[~np.asarray(boundary_mask)[fixed]]
        if interior.size:
            raise ValueError(f"Dirichlet value given for non-boundary vertices {interior[:10].tolist()}")
    is_fixed = np.zeros(n, dtype=bool)
    is_fixed[fixed] = True
    free = np.flatnonzero(~is_fixed)
    A_free = A[free]
    A_ff = A_free[:, free]
    rhs = np.asarray(b, dtype=float)[free] - A_free[:, fixed] @ vals
    return ConstrainedSystem(A_ff.tocsr(), rhs, free, fixed, np.array(vals, dtype=float))


def residual(mesh: Mesh, g: GPolynomial, prev, cur, dt: float, f: SpaceTimeFunction, t_n: float,
             M=None, load=None) -> np.ndarray:
    """Backward-Euler residual ``M (cur - prev)/dt + S(cur) cur - b(t_n)`` on the free rows."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    u = _values(cur, mesh)
    u0 = _values(prev, mesh)
    if M is None:
        M = assemble_mass(mesh)
    if load is None:
        load = assemble_load(mesh, f, t_n)
    r = M @ (u - u0) / dt + assemble_stiffness(mesh, u, g) @ u - load
    return r[mesh.free_nodes]
