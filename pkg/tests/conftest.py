import numpy as np
import pytest

from forchfem.forchheimer import DARCY_FORCHHEIMER, GPolynomial

G_LINEAR = DARCY_FORCHHEIMER
G_QUADRATIC = GPolynomial((0, 1, 2), (1, 1, 1))
G_FRACTIONAL = GPolynomial((0, 0.5, 2.7), (0.3, 2.0, 1.5))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_gpoly(rng, max_terms=4):
    n = int(rng.integers(2, max_terms + 1))
    alphas = np.concatenate([[0.0], np.sort(rng.uniform(0.1, 4.0, n - 1))])
    if np.any(np.diff(alphas) <= 0):
        alphas = np.arange(n, dtype=float)
    coeffs = rng.uniform(0.0, 3.0, n)
    coeffs[0] = rng.uniform(0.1, 3.0)
    coeffs[-1] = rng.uniform(0.1, 3.0)
    return GPolynomial(tuple(alphas), tuple(coeffs))


_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    ok = call.excinfo is None
    detail = "" if ok else str(call.excinfo.value).splitlines()[0]
    _criteria[number] = (title, ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok, detail = _criteria[number]
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  -- {detail}"
        terminalreporter.write_line(line)
