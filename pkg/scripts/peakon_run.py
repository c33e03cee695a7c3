"""Run a nonsmooth preset and track peak amplitude, minimum height and
viscosity activity; optionally write snapshots.

    python scripts/peakon_run.py single-peakon-I
    python scripts/peakon_run.py two-peakon-III --t-end 10 --snapshots 1 3 5 6 8 10 --out out/tp3
"""

import argparse

import numpy as np

from r2ch import diagnostics as dg
from r2ch.config import config_from_dict
from r2ch.studies import execute


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("preset")
    ap.add_argument("--t-end", type=float)
    ap.add_argument("--snapshots", type=float, nargs="*", default=[])
    ap.add_argument("--out", default="out")
    ap.add_argument("--viscosity", choices=["on", "off"])
    args = ap.parse_args()

    doc = {"preset": args.preset, "outputs": {"snapshot_times": args.snapshots, "output_dir": args.out}}
    if args.t_end is not None:
        doc["t_end"] = args.t_end
    if args.viscosity:
        doc["solver"] = {"viscosity": args.viscosity}
    cfg = config_from_dict(doc)
    s0 = cfg.scenario.initial_state(cfg.grid)
    res = execute(cfg, write=bool(args.snapshots))
    traj = res.trajectory
    print(f"{cfg.preset}: M={cfg.M} h={cfg.grid.h:g} tau={cfg.solver.tau:g} T={cfg.t_end:g} "
          f"viscosity={'on' if cfg.solver.viscosity_enabled else 'off'}")
    print(f"initial max|u| = {np.max(np.abs(s0.u)):.6f}")
    for k, n in enumerate(traj.levels):
        print(f"  t={traj.times[k]:8.4f}  max|u|={np.max(np.abs(traj.u[k])):.6f}  "
              f"min rho={np.min(traj.rho[k]):.6f}")
    reps = [r for r in res.series.reports if r is not None]
    if reps:
        print(f"max Picard iterations {max(r.iterations for r in reps)}, "
              f"max active viscosity nodes {max(r.viscosity_active_nodes for r in reps)}")
    drift = dg.max_drift(res.series.records)
    print("absolute drift: " + "  ".join(f"{k}={v:.3e}" for k, v in drift.items()))


if __name__ == "__main__":
    main()
