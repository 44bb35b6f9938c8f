"""Refinement study for Example 2 (nonzero boundary data) at T = 1.

    python3 scripts/reproduce_table2.py --N 4,8,16,32,64
"""
import argparse

from forchfem.analysis import convergence_table, error_grad_lbeta, error_l2, error_linf, format_table, write_csv
from forchfem.mesh import unit_square_mesh
from forchfem.problems import example2
from forchfem.solver import TimeSteppingConfig, run_transient


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--N", default="4,8,16,32,64")
    ap.add_argument("--dt", type=float, default=1 / 256)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    problem = example2()
    cfg = TimeSteppingConfig(dt=args.dt, t_end=1.0)
    rows, iters = [], []
    for N in (int(v) for v in args.N.split(",")):
        mesh = unit_square_mesh(N)
        traj = run_transient(mesh, problem, cfg, keep_fields=False)
        u = traj.final.values
        iters.append(max(traj.iterations))
        rows.append((N, error_l2(mesh, u, problem.exact, 1.0),
                     error_grad_lbeta(mesh, u, problem.exact_grad, 1.0, 1.5),
                     error_linf(mesh, u, problem.exact, 1.0)))
    table = convergence_table(rows)
    print(format_table(table))
    print("max Picard iterations per level:", iters)
    if args.out:
        with open(args.out, "w") as fh:
            write_csv(table, fh)


if __name__ == "__main__":
    main()
