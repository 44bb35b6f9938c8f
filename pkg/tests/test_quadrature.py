from math import factorial

import numpy as np
import pytest

from forchfem.quadrature import CENTROID, DEGREE4, DEGREE5


def monomial_integral(i, j):
    """int over the reference triangle of x^i y^j."""
    return factorial(i) * factorial(j) / factorial(i + j + 2)


@pytest.mark.parametrize("rule", [CENTROID, DEGREE4, DEGREE5])
def test_exactness(rule):
    x, y = rule.bary[:, 1], rule.bary[:, 2]
    for i in range(rule.degree + 1):
        for j in range(rule.degree + 1 - i):
            approx = 0.5 * np.sum(rule.weights * x**i * y**j)
            assert approx == pytest.approx(monomial_integral(i, j), rel=1e-13, abs=1e-15)


@pytest.mark.parametrize("rule", [DEGREE4, DEGREE5])
def test_weights_and_points(rule):
    assert rule.weights.sum() == pytest.approx(1.0, abs=2e-15)
    assert np.allclose(rule.bary.sum(axis=1), 1.0)
    assert np.all(rule.bary > 0)


def test_degree4_not_exact_for_degree6():
    x, y = DEGREE4.bary[:, 1], DEGREE4.bary[:, 2]
    approx = 0.5 * np.sum(DEGREE4.weights * x**6)
    assert abs(approx - monomial_integral(6, 0)) > 1e-8
