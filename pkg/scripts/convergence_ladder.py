"""Posterior-error ladders for a dam-break case.

    python scripts/convergence_ladder.py --case I --axis time --levels 5
    python scripts/convergence_ladder.py --case I --axis space --levels 5 --N 4000
"""

import argparse
import logging

from r2ch.config import config_from_dict
from r2ch.scenarios import PRESETS
from r2ch.studies import convergence_study


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--case", default="I", choices=["I", "II", "III", "IV"])
    ap.add_argument("--axis", default="time", choices=["time", "space"])
    ap.add_argument("--levels", type=int, default=5)
    ap.add_argument("--N", type=int, help="step count (fixed on the space axis, base rung on the time axis)")
    ap.add_argument("--M", type=int, help="node count (fixed on the time axis, base rung on the space axis)")
    ap.add_argument("--tol", type=float, default=1e-13)
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)

    doc = {"preset": f"smooth-{args.case}", "solver": {"tol": args.tol}}
    if args.N:
        doc["N"] = args.N
        doc["t_end"] = PRESETS[doc["preset"]].t_end
    if args.M:
        doc["M"] = args.M
    cfg = config_from_dict(doc)
    table = convergence_study(cfg, args.axis, args.levels)
    print(f"case {args.case}, {args.axis} axis, T={cfg.t_end:g}")
    print(table.text(), end="")


if __name__ == "__main__":
    main()
