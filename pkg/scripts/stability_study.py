"""Decay of the discrete solution for zero forcing and zero boundary data.

Starts from a random interior field and prints the L2 norm, the gradient
L^beta norm and omega_h every ``--every`` steps.

    python3 scripts/stability_study.py --N 16 --dt 0.05 --steps 400
"""
import argparse

import numpy as np

from forchfem.analysis import energy_diagnostics
from forchfem.forchheimer import GPolynomial
from forchfem.mesh import unit_square_mesh
from forchfem.problems import homogeneous
from forchfem.solver import TimeSteppingConfig, run_transient


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--N", type=int, default=16)
    ap.add_argument("--dt", type=float, default=0.05)
    ap.add_argument("--steps", type=int, default=400)
    ap.add_argument("--alphas", default="0,1", help="exponents of g, comma-separated")
    ap.add_argument("--coeffs", default="1,1", help="coefficients of g, comma-separated")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--every", type=int, default=20)
    args = ap.parse_args()

    g = GPolynomial.from_arrays([float(v) for v in args.alphas.split(",")],
                                [float(v) for v in args.coeffs.split(",")])
    mesh = unit_square_mesh(args.N)
    rng = np.random.default_rng(args.seed)
    u0 = rng.uniform(-1.0, 1.0, mesh.n_vertices)
    u0[mesh.boundary_mask] = 0.0
    cfg = TimeSteppingConfig(dt=args.dt, t_end=args.dt * args.steps)
    traj = run_transient(mesh, homogeneous(g), cfg, u0=u0, keep_fields=False)
    d = energy_diagnostics(traj, g)
    print(f"{'step':>5} {'t':>8} {'L2':>11} {'grad_beta':>11} {'omega':>8}")
    for k in range(0, len(d["time"]), args.every):
        print(f"{k:5d} {d['time'][k]:8.3f} {d['l2'][k]:11.3e} {d['grad_lbeta'][k]:11.3e} {d['omega'][k]:8.4f}")
    mono = bool(np.all(np.diff(d["l2"]) <= 0))
    print(f"nonincreasing: {mono}; final/initial = {d['l2'][-1] / d['l2'][0]:.3e}")


if __name__ == "__main__":
    main()
