"""Symmetric quadrature rules on triangles (Dunavant), in barycentric form.

Weights are normalised to sum to 1, so an element integral is
``area * sum_q w_q f(x_q)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TriangleRule:
    degree: int
    bary: np.ndarray  # (q, 3)
    weights: np.ndarray  # (q,)

    def points(self, corners):
        """Physical quadrature points for triangles with corners ``(nt, 3, 2)``; shape ``(nt, q, 2)``."""
        return np.einsum("qk,ekd->eqd", self.bary, corners)


def _orbit3(a, w):
    b = 1.0 - 2.0 * a
    return [(a, a, b), (a, b, a), (b, a, a)], [w] * 3


def _rule(degree, orbits, centroid=None):
    bary, weights = [], []
    if centroid is not None:
        bary.append((1 / 3, 1 / 3, 1 / 3))
        weights.append(centroid)
    for a, w in orbits:
        pts, ws = _orbit3(a, w)
        bary += pts
        weights += ws
    return TriangleRule(degree, np.array(bary), np.array(weights))


CENTROID = TriangleRule(1, np.array([[1 / 3, 1 / 3, 1 / 3]]), np.array([1.0]))

DEGREE4 = _rule(
    4,
    [
        (0.445948490915965, 0.223381589678011),
        (0.091576213509771, 0.109951743655322),
    ],
)

DEGREE5 = _rule(
    5,
    [
        (0.470142064105115, 0.132394152788506),
        (0.101286507323456, 0.125939180544827),
    ],
    centroid=0.225,
)

RULES = {1: CENTROID, 4: DEGREE4, 5: DEGREE5}
