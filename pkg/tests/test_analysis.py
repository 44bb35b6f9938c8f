import io
import math

import numpy as np
import pytest

from forchfem.analysis import (
    CSV_HEADER,
    convergence_table,
    energy_diagnostics,
    error_grad_lbeta,
    error_l2,
    error_linf,
    format_table,
    write_csv,
)
from forchfem.fem import interpolate
from forchfem.mesh import unit_square_mesh
from forchfem.problems import example1, homogeneous
from forchfem.quadrature import DEGREE5
from forchfem.solver import TimeSteppingConfig, Trajectory, run_transient

TABLE1_T1_L2 = [1.668e-02, 1.049e-02, 6.004e-03, 3.272e-03, 1.723e-03, 8.889e-04, 4.531e-04]
TABLE1_T1_L2_RATES = [0.669, 0.805, 0.876, 0.926, 0.954, 0.972]
TABLE1_T1_GRAD = [7.081e-02, 4.654e-02, 2.741e-02, 1.530e-02, 8.277e-03, 4.411e-03, 2.336e-03]
TABLE1_T1_GRAD_RATES = [0.605, 0.764, 0.841, 0.887, 0.908, 0.917]


def linear(x, t):
    return 1.0 + 2.0 * x[..., 0] - 0.5 * x[..., 1]


def linear_grad(x, t):
    return np.broadcast_to(np.array([2.0, -0.5]), np.shape(x))


class TestNorms:
    def test_linear_reproduced(self):
        m = unit_square_mesh(5)
        u = interpolate(m, linear).values
        assert error_l2(m, u, linear, 0.0) <= 1e-14
        assert error_grad_lbeta(m, u, linear_grad, 0.0, 1.5) <= 1e-14
        assert error_linf(m, u, linear, 0.0) <= 1e-14

    def test_constant_offset(self):
        m = unit_square_mesh(5)
        u = interpolate(m, linear).values + 0.3
        assert error_l2(m, u, linear, 0.0) == pytest.approx(0.3, rel=1e-13)
        assert error_linf(m, u, linear, 0.0) == pytest.approx(0.3, rel=1e-13)

    @pytest.mark.parametrize("beta", [1.2, 1.5, 2.0])
    def test_constant_gradient_mismatch(self, beta):
        m = unit_square_mesh(4)
        u = interpolate(m, linear).values + 0.3 * m.vertices[:, 0] + 0.4 * m.vertices[:, 1]
        assert error_grad_lbeta(m, u, linear_grad, 0.0, beta) == pytest.approx(0.5, rel=1e-13)

    def test_linf_decreases_with_refinement(self):
        errs = []
        for N in (4, 8, 16):
            m = unit_square_mesh(N)
            tr = run_transient(m, example1(), TimeSteppingConfig(dt=1 / 64, t_end=1.0), keep_fields=False)
            errs.append(error_linf(m, tr.final.values, example1().exact, 1.0))
        rates = np.log2(np.array(errs[:-1]) / errs[1:])
        assert np.all(rates >= 1.0), rates

    def test_quadrature_independence(self):
        m = unit_square_mesh(8)
        ex = example1()
        tr = run_transient(m, ex, TimeSteppingConfig(dt=1 / 32, t_end=1.0), keep_fields=False)
        u = tr.final.values
        a, b = error_l2(m, u, ex.exact, 1.0), error_l2(m, u, ex.exact, 1.0, rule=DEGREE5)
        assert abs(a - b) <= 1e-3 * b
        a = error_grad_lbeta(m, u, ex.exact_grad, 1.0, 1.5)
        b = error_grad_lbeta(m, u, ex.exact_grad, 1.0, 1.5, rule=DEGREE5)
        assert abs(a - b) <= 1e-3 * b


class TestConvergenceTable:
    def test_simple_rates(self):
        rows = convergence_table([(4, 1e-2, 1.0, 1.0), (8, 5e-3, 1.0, 1.0)])
        assert rows[0].rate_l2 is None and rows[0].rate_grad is None
        assert rows[1].rate_l2 == pytest.approx(1.0)
        assert rows[1].rate_grad == 0.0
        assert rows[1].h == 0.125

    def test_non_doubling(self):
        with pytest.raises(ValueError, match="double"):
            convergence_table([(4, 1, 1, 1), (8, 1, 1, 1), (12, 1, 1, 1)])

    def test_published_rates_from_published_errors(self):
        Ns = [4 * 2**k for k in range(7)]
        rows = convergence_table(zip(Ns, TABLE1_T1_L2, TABLE1_T1_GRAD, TABLE1_T1_L2))
        assert [r.rate_l2 for r in rows[1:]] == pytest.approx(TABLE1_T1_L2_RATES, abs=1e-3)
        assert [r.rate_grad for r in rows[1:]] == pytest.approx(TABLE1_T1_GRAD_RATES, abs=1e-3)

    def test_csv(self):
        rows = convergence_table([(4, 1.23456789e-2, 0.1, 0.2), (8, 5e-3, 0.05, 0.1)])
        text = write_csv(rows)
        lines = text.splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert lines[1] == "4,0.25,0.0123457,,0.1,,0.2"
        assert lines[2].split(",")[3] == f"{math.log2(1.23456789e-2 / 5e-3):.6g}"
        buf = io.StringIO()
        write_csv(rows, buf)
        assert buf.getvalue() == text
        assert "1.235E-02" in format_table(rows)


class TestEnergy:
    def test_zero_trajectory(self):
        tr = Trajectory(times=[0.0, 0.1], l2_norms=[0.0, 0.0], grad_norms=[0.0, 0.0], iterations=[0, 1])
        d = energy_diagnostics(tr, homogeneous().g)
        assert np.all(d["omega"] == 1.0)

    def test_empty(self):
        with pytest.raises(ValueError):
            energy_diagnostics(Trajectory(), homogeneous().g)

    def test_homogeneous_decay(self):
        m = unit_square_mesh(8)
        tr = run_transient(m, homogeneous(), TimeSteppingConfig(dt=0.05, t_end=1.0), keep_fields=False)
        d = energy_diagnostics(tr, homogeneous().g)
        assert np.all((d["omega"] > 0) & (d["omega"] <= 1))
        assert d["grad_lbeta"][-1] < d["grad_lbeta"][0]
        assert np.all(np.diff(d["omega"]) >= 0)
