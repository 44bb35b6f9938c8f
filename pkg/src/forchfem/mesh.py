"""Structured triangulations of the unit square."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class ElementGeometry:
    area: float
    grad_phi: np.ndarray  # (3, 2)


def triangle_geometry(points):
    """Areas and barycentric gradients for triangles given as ``(..., 3, 2)`` arrays.

    Returns signed areas (positive for counter-clockwise ordering) and
    gradients of shape ``(..., 3, 2)``.
    """
    p = np.asarray(points, dtype=float)
    x, y = p[..., 0], p[..., 1]
    det = (x[..., 1] - x[..., 0]) * (y[..., 2] - y[..., 0]) - (x[..., 2] - x[..., 0]) * (y[..., 1] - y[..., 0])
    grads = np.empty(p.shape, dtype=float)
    grads[..., 0, 0] = y[..., 1] - y[..., 2]
    grads[..., 0, 1] = x[..., 2] - x[..., 1]
    grads[..., 1, 0] = y[..., 2] - y[..., 0]
    grads[..., 1, 1] = x[..., 0] - x[..., 2]
    grads[..., 2, 0] = y[..., 0] - y[..., 1]
    grads[..., 2, 1] = x[..., 1] - x[..., 0]
    grads /= det[..., None, None]
    return 0.5 * det, grads


@dataclass(frozen=True, eq=False)
class Mesh:
    vertices: np.ndarray
    triangles: np.ndarray
    boundary_mask: np.ndarray
    N: int

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @cached_property
    def _geometry(self):
        areas, grads = triangle_geometry(self.vertices[self.triangles])
        return areas, grads

    @property
    def areas(self) -> np.ndarray:
        return self._geometry[0]

    @property
    def grads(self) -> np.ndarray:
        return self._geometry[1]

    @cached_property
    def boundary_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.boundary_mask)

    @cached_property
    def free_nodes(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary_mask)

    def write(self, path) -> None:
        """Dump as text: ``v x y`` per vertex then ``t i j k`` per triangle."""
        lines = [f"v {x:.17g} {y:.17g}" for x, y in self.vertices]
        lines += [f"t {i} {j} {k}" for i, j, k in self.triangles]
        Path(path).write_text("\n".join(lines) + "\n")


def unit_square_mesh(N: int) -> Mesh:
    """Split each of the N x N cells along its lower-left to upper-right diagonal."""
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N!r}")
    N = int(N)
    ticks = np.linspace(0.0, 1.0, N + 1)
    X, Y = np.meshgrid(ticks, ticks)  # row j holds y = ticks[j]
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    i, j = np.meshgrid(np.arange(N), np.arange(N))
    v00 = (j * (N + 1) + i).ravel()
    v10 = v00 + 1
    v01 = v00 + N + 1
    v11 = v01 + 1
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    triangles = np.empty((2 * N * N, 3), dtype=np.int64)
    triangles[0::2] = lower
    triangles[1::2] = upper

    x, y = vertices[:, 0], vertices[:, 1]
    boundary = (
        (np.abs(x) < BOUNDARY_TOL)
        | (np.abs(x - 1) < BOUNDARY_TOL)
        | (np.abs(y) < BOUNDARY_TOL)
        | (np.abs(y - 1) < BOUNDARY_TOL)
    )
    for arr in (vertices, triangles, boundary):
        arr.setflags(write=False)
    return Mesh(vertices=vertices, triangles=triangles, boundary_mask=boundary, N=N)


def element_geometry(mesh: Mesh, e: int) -> ElementGeometry:
    if not 0 <= e < mesh.n_triangles:
        raise IndexError(f"triangle index {e} out of range [0, {mesh.n_triangles})")
    return ElementGeometry(area=float(mesh.areas[e]), grad_phi=mesh.grads[e].copy())


def edge_incidence(mesh: Mesh):
    """Unique undirected edges and the number of triangles sharing each."""
    t = mesh.triangles
    edges = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    edges.sort(axis=1)
    return np.unique(edges, axis=0, return_counts=True)
