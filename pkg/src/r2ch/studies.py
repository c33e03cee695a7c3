"""Run orchestration: single runs with file output, conservation audits and
posterior-error convergence ladders."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

from . import diagnostics as dg
from .config import RunConfig
from .scheme import NonConvergence, State, StepReport, Trajectory, run

log = logging.getLogger(__name__)

SNAPSHOT_HEADER = ("x", "u", "rho", "m")
CONSERVED_HEADER = ("n", "t", "I1", "I2", "E", "H", "iters", "res_m", "res_rho", "visc_nodes")


def fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % v


@dataclass
class ConservedSeries:
    """Conserved-quantity rows plus the step statistics of the producing step."""

    records: list[dg.ConservedRecord] = field(default_factory=list)
    reports: list[StepReport | None] = field(default_factory=list)

    def rows(self):
        for r, rep in zip(self.records, self.reports):
            if rep is None:
                stats = (0, 0.0, 0.0, 0)
            else:
                stats = (rep.iterations, rep.residual_m, rep.residual_rho, rep.viscosity_active_nodes)
            yield (r.n, r.t, r.I1, r.I2, r.E, r.H) + stats


def conserved_observer(series: ConservedSeries, params, every: int, N: int, extra_levels=(), compensated=False):
    wanted = set(extra_levels)

    def observe(n: int, s: State, rep: StepReport | None):
        if n == 0 or n == N or n % every == 0 or n in wanted:
            series.records.append(dg.conserved(s, params, n, compensated))
            series.reports.append(rep)

    return observe


def write_snapshot(path: Path, s: State, n: int, format: str):
    x = s.grid.x
    if format == "csv":
        with open(path, "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(SNAPSHOT_HEADER)
            for row in zip(x, s.u, s.rho, s.m):
                w.writerow([fmt(v) for v in row])
    else:
        doc = {"n": n, "t": s.t, "x": x.tolist(), "u": s.u.tolist(), "rho": s.rho.tolist(), "m": s.m.tolist()}
        path.write_text(json.dumps(doc) + "\n")


def write_conserved(path: Path, series: ConservedSeries, format: str):
    rows = list(series.rows())
    if format == "csv":
        with open(path, "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(CONSERVED_HEADER)
            for row in rows:
                w.writerow([fmt(v) for v in row])
    else:
        path.write_text(json.dumps([dict(zip(CONSERVED_HEADER, r)) for r in rows]) + "\n")


@dataclass
class RunResult:
    trajectory: Trajectory
    series: ConservedSeries
    files: list[Path]


def execute(cfg: RunConfig, write: bool = True) -> RunResult:
    """Run ``cfg``; write snapshots and the conserved series into ``output_dir``."""
    grid = cfg.grid
    initial = cfg.scenario.initial_state(grid)
    p = cfg.scenario.params
    snap_levels = cfg.snapshot_levels()
    series = ConservedSeries()
    obs = conserved_observer(series, p, cfg.outputs.conserved_every, cfg.N, snap_levels)
    traj = run(initial, p, cfg.solver, initial.t + cfg.N * cfg.solver.tau, [obs], store_levels=snap_levels)

    files = []
    if write:
        out = Path(cfg.outputs.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        ext = cfg.outputs.format
        by_level = {n: k for k, n in enumerate(traj.levels)}
        for n in sorted(set(snap_levels)):
            path = out / f"snapshot_{n:07d}.{ext}"
            write_snapshot(path, traj.state(by_level[n]), n, ext)
            files.append(path)
        path = out / f"conserved.{ext}"
        write_conserved(path, series, ext)
        files.append(path)
    return RunResult(traj, series, files)


def conservation_audit(cfg: RunConfig) -> tuple[ConservedSeries, dict]:
    """Conserved quantities at the configured rows plus max drifts over every level.

    Row values use the reproducible sequential sums; the drift summary is
    computed from compensated (fsum) sums over all time levels.
    """
    grid = cfg.grid
    initial = cfg.scenario.initial_state(grid)
    p = cfg.scenario.params
    rows = ConservedSeries()
    every = ConservedSeries()
    obs_rows = conserved_observer(rows, p, cfg.outputs.conserved_every, cfg.N, cfg.snapshot_levels())
    obs_all = conserved_observer(every, p, 1, cfg.N, compensated=True)
    run(initial, p, cfg.solver, initial.t + cfg.N * cfg.solver.tau, [obs_rows, obs_all], store_levels=())
    summary = {
        "absolute": dg.max_drift(every.records),
        "relative": dg.max_drift(every.records, relative=True),
        "summation": "compensated (math.fsum)",
    }
    return rows, summary


# ---------------------------------------------------------------- convergence ladders

Runner = Callable[[RunConfig], Trajectory]


def _default_runner(cfg: RunConfig) -> Trajectory:
    grid = cfg.grid
    initial = cfg.scenario.initial_state(grid)
    return run(initial, cfg.scenario.params, cfg.solver, initial.t + cfg.N * cfg.solver.tau)


class LadderError(RuntimeError):
    def __init__(self, rung: int, resolution: int, cause: Exception):
        super().__init__(f"convergence rung {rung} (resolution {resolution}) failed: {cause}")
        self.rung = rung
        self.resolution = resolution
        self.cause = cause


@dataclass
class ConvergenceTable:
    axis: str
    u: list[dg.ConvergenceRow]
    rho: list[dg.ConvergenceRow]

    def csv_text(self) -> str:
        lines = ["resolution,err_u,ord_u,err_rho,ord_rho"]
        for ru, rr in zip(self.u, self.rho):
            lines.append(",".join([
                str(ru.resolution), fmt(ru.error), "" if ru.order is None else fmt(ru.order),
                fmt(rr.error), "" if rr.order is None else fmt(rr.order),
            ]))
        return "\n".join(lines) + "\n"

    def text(self) -> str:
        label = "N" if self.axis == "time" else "M"
        kind = "G" if self.axis == "time" else "F"
        head = f"{label:>6}  {('|' + kind + '_u|_inf'):>12}  {'Ord':>7}  {('|' + kind + '_rho|_inf'):>12}  {'Ord':>7}"
        out = [head, "-" * len(head)]
        for ru, rr in zip(self.u, self.rho):
            ou = "*" if ru.order is None else f"{ru.order:.4f}"
            orr = "*" if rr.order is None else f"{rr.order:.4f}"
            out.append(f"{ru.resolution:>6}  {ru.error:>12.4e}  {ou:>7}  {rr.error:>12.4e}  {orr:>7}")
        return "\n".join(out) + "\n"


def convergence_study(cfg: RunConfig, axis: str, levels: int, runner: Runner = _default_runner) -> ConvergenceTable:
    """Posterior-error ladder.

    ``levels`` rows are produced from ``levels + 1`` runs.  On the time axis
    the grid is fixed at ``cfg.M`` and N doubles from ``cfg.N``; on the space
    axis N is fixed and M doubles from ``cfg.M``.  Row k compares rung k
    with rung k+1.
    """
    if axis not in ("space", "time"):
        raise ValueError(f"axis must be 'space' or 'time', got {axis!r}")
    if levels < 2:
        raise ValueError("a convergence study needs at least 2 levels")

    def rung_cfg(k):
        if axis == "time":
            N = cfg.N * 2**k
            return replace(cfg, N=N, solver=replace(cfg.solver, tau=cfg.t_end / N))
        return replace(cfg, M=cfg.M * 2**k)

    diff = dg.sup_diff_time if axis == "time" else dg.sup_diff_space
    resolutions, eu, er = [], [], []
    prev = None
    for k in range(levels + 1):
        rc = rung_cfg(k)
        res = rc.N if axis == "time" else rc.M
        try:
            traj = runner(rc)
        except (NonConvergence, FloatingPointError) as exc:
            raise LadderError(k, res, exc) from exc
        if prev is not None:
            eu.append(diff(prev[1], traj, "u"))
            er.append(diff(prev[1], traj, "rho"))
            resolutions.append(prev[0])
            log.info("%s rung %d: %s=%d  |e_u|=%.4e  |e_rho|=%.4e", axis, k - 1, "N" if axis == "time" else "M",
                     prev[0], eu[-1], er[-1])
        prev = (res, traj)
    return ConvergenceTable(axis, dg.convergence_rows(resolutions, eu), dg.convergence_rows(resolutions, er))


def conservation_text(series: ConservedSeries, summary: dict) -> str:
    lines = [f"{'n':>8}  {'t':>10}  {'E':>22}  {'I1':>22}  {'I2':>22}  {'H':>22}"]
    for r in series.records:
        lines.append(f"{r.n:>8}  {r.t:>10.4g}  {r.E:>22.16g}  {r.I1:>22.16g}  {r.I2:>22.16g}  {r.H:>22.16g}")
    a, rel = summary["absolute"], summary["relative"]
    lines.append("")
    lines.append(f"max drift ({summary['summation']}):")
    for key in ("E", "I1", "I2", "H"):
        lines.append(f"  {key:>2}: absolute {a[key]:.3e}  relative {rel[key]:.3e}")
    return "\n".join(lines) + "\n"


def write_table(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)

