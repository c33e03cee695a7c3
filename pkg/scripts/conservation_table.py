"""Conserved quantities of the dam-break cases at integer times.

    python scripts/conservation_table.py            # all four cases
    python scripts/conservation_table.py II IV --tol 1e-14
"""

import argparse

from r2ch import diagnostics as dg
from r2ch.config import config_from_dict
from r2ch.scheme import run


def table(case, tol):
    cfg = config_from_dict({"preset": f"smooth-{case}-table5", "solver": {"tol": tol}})
    p = cfg.scenario.params
    every = round(1.0 / cfg.solver.tau)
    rows = []

    def obs(n, s, rep):
        if n % every == 0:
            rows.append(dg.conserved(s, p, n))

    run(cfg.scenario.initial_state(cfg.grid), p, cfg.solver, cfg.t_end, [obs], store_levels=())
    print(f"case {case}: M={cfg.M} h={cfg.grid.h:.6g} tau={cfg.solver.tau:g}")
    print(f"{'t':>5}  {'E':>22}  {'I1':>22}  {'I2':>22}")
    for r in rows:
        print(f"{r.t:>5.1f}  {r.E:>22.16g}  {r.I1:>22.16g}  {r.I2:>22.15g}")
    print()


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("cases", nargs="*", default=["I", "II", "III", "IV"])
    ap.add_argument("--tol", type=float, default=1e-13)
    args = ap.parse_args()
    for case in args.cases:
        table(case, args.tol)


if __name__ == "__main__":
    main()
