"""Monitor H^n - H^0 on the symmetric-data presets against the budget
1e-3 (1 + max|E|)."""

import argparse

from r2ch import diagnostics as dg
from r2ch.scenarios import PRESETS
from r2ch.scheme import run


def monitor(name, every):
    p = PRESETS[name]
    prm = p.scenario.params
    recs = []
    run(p.initial_state(), prm, p.solver, p.t_end, [lambda n, s, rep: recs.append(dg.conserved(s, prm, n))],
        store_levels=())
    H0 = recs[0].H
    budget = 1e-3 * (1 + max(abs(r.E) for r in recs))
    print(f"{name}: h={p.grid.h:g} tau={p.solver.tau:g} H0={H0:.3e} budget={budget:.3e}")
    for r in recs[::every]:
        print(f"  t={r.t:7.3f}  H-H0={r.H - H0:+.3e}  E={r.E:.10g}")
    print(f"  max |H-H0| = {max(abs(r.H - H0) for r in recs):.3e}\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("presets", nargs="*", default=["smooth-I-H", "sinh-I-H", "two-peakon-I-H"])
    ap.add_argument("--every", type=int, default=400)
    args = ap.parse_args()
    for name in args.presets:
        monitor(name, args.every)


if __name__ == "__main__":
    main()
