"""Discrete invariants and the posterior-error convergence harness.

The invariants are plain node sums without the factor h, so their values
scale with the resolution:

    I1 = sum rho_i
    I2 = sum (u_i + Omega rho_i^2)
    E  = 1/2 sum (u_i^2 + (Du)_i^2 + (1 - 2 Omega A) rho_i^2)
    H  = sum (u_i^3 + u_i (Du)_i^2 - A u_i^2 - mu (Du)_i^2 + u_i rho_i^2)

with (Du)_i the periodic central difference.  Sums run sequentially in
ascending node order so results are reproducible bit for bit; pass
``compensated=True`` for an fsum-based value (used by drift audits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .mesh import central_diff
from .scheme import Parameters, State, Trajectory


def _sum(terms: np.ndarray, compensated: bool = False) -> float:
    if terms.size == 0:
        return 0.0
    if compensated:
        return math.fsum(terms.tolist())
    return float(np.cumsum(terms)[-1])


def mass(s: State, compensated: bool = False) -> float:
    return _sum(s.rho, compensated)


def momentum_total(s: State, p: Parameters, compensated: bool = False) -> float:
    return _sum(s.u + p.Omega * s.rho**2, compensated)


def energy(s: State, p: Parameters, compensated: bool = False) -> float:
    du = central_diff(s.u, s.grid.h)
    return 0.5 * _sum(s.u**2 + du**2 + p.height_coeff * s.rho**2, compensated)


def hamiltonian_h(s: State, p: Parameters, compensated: bool = False) -> float:
    u, du = s.u, central_diff(s.u, s.grid.h)
    return _sum(u**3 + u * du**2 - p.A * u**2 - p.mu * du**2 + u * s.rho**2, compensated)


@dataclass(frozen=True)
class ConservedRecord:
    n: int
    t: float
    I1: float
    I2: float
    E: float
    H: float


def conserved(s: State, p: Parameters, n: int = 0, compensated: bool = False) -> ConservedRecord:
    return ConservedRecord(
        n, s.t,
        mass(s, compensated),
        momentum_total(s, p, compensated),
        energy(s, p, compensated),
        hamiltonian_h(s, p, compensated),
    )


def max_drift(records: Sequence[ConservedRecord], relative: bool = False) -> dict[str, float]:
    """max_n |Q^n - Q^0| for each invariant (divided by |Q^0| when relative)."""
    if not records:
        return {}
    first = records[0]
    out = {}
    for key in ("I1", "I2", "E", "H"):
        q0 = getattr(first, key)
        d = max(abs(getattr(r, key) - q0) for r in records)
        if relative:
            d = d / abs(q0) if q0 != 0 else (0.0 if d == 0 else math.inf)
        out[key] = d
    return out


class AlignmentError(ValueError):
    """Two trajectories cannot be compared node-for-node / level-for-level."""


def _field(traj: Trajectory, component: str) -> list[np.ndarray]:
    if component not in ("u", "rho"):
        raise ValueError(f"component must be 'u' or 'rho', got {component!r}")
    return traj.u if component == "u" else traj.rho


def _same(a: float, b: float, rtol: float = 1e-12) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b), 1.0)


def sup_diff_space(coarse: Trajectory, fine: Trajectory, component: str = "u") -> float:
    """max_{i, n>=1} |w_i^n(h, tau) - w_{2i}^n(h/2, tau)|."""
    gc, gf = coarse.grid, fine.grid
    if gf.M != 2 * gc.M:
        raise AlignmentError(f"fine grid has {gf.M} nodes, expected {2 * gc.M}")
    if not (_same(gc.xmin, gf.xmin) and _same(gc.xmax, gf.xmax)):
        raise AlignmentError("trajectories live on different domains")
    if not _same(coarse.tau, fine.tau):
        raise AlignmentError(f"time steps differ: {coarse.tau} vs {fine.tau}")
    if coarse.levels != fine.levels:
        raise AlignmentError("trajectories store different time levels")
    wc, wf = _field(coarse, component), _field(fine, component)
    err = 0.0
    for k, n in enumerate(coarse.levels):
        if n == 0:
            continue
        err = max(err, float(np.max(np.abs(wc[k] - wf[k][::2]))))
    return err


def sup_diff_time(coarse: Trajectory, fine: Trajectory, component: str = "u") -> float:
    """max_{i, n>=1} |w_i^n(h, tau) - w_i^{2n}(h, tau/2)|."""
    if coarse.grid != fine.grid:
        raise AlignmentError("time comparison needs identical grids")
    if not _same(fine.tau * 2, coarse.tau):
        raise AlignmentError(f"fine tau {fine.tau} is not half of coarse tau {coarse.tau}")
    index = {n: k for k, n in enumerate(fine.levels)}
    missing = [n for n in coarse.levels if 2 * n not in index]
    if missing:
        raise AlignmentError(f"fine trajectory lacks levels {[2 * n for n in missing[:5]]}...")
    wc, wf = _field(coarse, component), _field(fine, component)
    err = 0.0
    for k, n in enumerate(coarse.levels):
        if n == 0:
            continue
        err = max(err, float(np.max(np.abs(wc[k] - wf[index[2 * n]]))))
    return err


def observed_order(e_coarse: float, e_fine: float) -> float:
    """log2(e_coarse / e_fine)."""
    if not (e_coarse > 0 and e_fine > 0):
        raise ValueError(f"errors must be positive, got {e_coarse!r}, {e_fine!r}")
    return math.log(e_coarse / e_fine) / math.log(2.0)


@dataclass(frozen=True)
class ConvergenceRow:
    resolution: int
    error: float
    order: float | None = None


def convergence_rows(resolutions: Sequence[int], errors: Sequence[float]) -> list[ConvergenceRow]:
    rows = []
    for k, (r, e) in enumerate(zip(resolutions, errors)):
        order = None
        if k > 0 and errors[k - 1] > 0 and e > 0:
            order = observed_order(errors[k - 1], e)
        rows.append(ConvergenceRow(int(r), float(e), order))
    return rows
