"""Refinement study for Example 1 (zero boundary data) at T = 1, printed next to the published values.

    python3 scripts/reproduce_table1.py --dt 0.00390625 --N 4,8,16,32,64 --out table1.csv
"""
import argparse

from forchfem.analysis import convergence_table, error_grad_lbeta, error_l2, error_linf, format_table, write_csv
from forchfem.mesh import unit_square_mesh
from forchfem.problems import example1
from forchfem.solver import TimeSteppingConfig, run_transient

PUBLISHED_L2 = {4: 1.668e-02, 8: 1.049e-02, 16: 6.004e-03, 32: 3.272e-03, 64: 1.723e-03,
                128: 8.889e-04, 256: 4.531e-04}
PUBLISHED_GRAD = {4: 7.081e-02, 8: 4.654e-02, 16: 2.741e-02, 32: 1.530e-02, 64: 8.277e-03}


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--N", default="4,8,16,32,64")
    ap.add_argument("--dt", type=float, default=1 / 256)
    ap.add_argument("--T", type=float, default=1.0)
    ap.add_argument("--scheme", choices=["picard", "newton"], default="picard")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    problem = example1()
    cfg = TimeSteppingConfig(dt=args.dt, t_end=args.T, scheme=args.scheme)
    rows = []
    for N in (int(v) for v in args.N.split(",")):
        mesh = unit_square_mesh(N)
        u = run_transient(mesh, problem, cfg, keep_fields=False).final.values
        rows.append((N, error_l2(mesh, u, problem.exact, args.T),
                     error_grad_lbeta(mesh, u, problem.exact_grad, args.T, 1.5),
                     error_linf(mesh, u, problem.exact, args.T)))
    table = convergence_table(rows)
    print(format_table(table))
    if args.T == 1.0:
        print("\nratio computed / published (L2, gradient):")
        for r in table:
            if r.N in PUBLISHED_GRAD:
                print(f"  N={r.N:4d}  {r.err_l2 / PUBLISHED_L2[r.N]:.3g}  "
                      f"{r.err_grad_lbeta / PUBLISHED_GRAD[r.N]:.3g}")
    if args.out:
        with open(args.out, "w") as fh:
            write_csv(table, fh)


if __name__ == "__main__":
    main()
