"""Fully discrete conservative scheme for the rotation two-component CH system.

One time step solves the implicit midpoint system for the star variables
(u*, rho*, m*) by Picard iteration and extrapolates the new level as
2*(star) - (old).  Per sweep, with iterate (u^l, rho^l, m^l)::

    rho^{l+1} = rho^n - tau/(8h) * flux(u^l, rho^l)          [+ tau/2 * R^rho]
    m^{l+1}   = m^n   - tau/2   * F(u^l, m^l, rho^{l+1})      [+ tau/2 * R^u]
    u^{l+1}   = B^{-1} m^{l+1}

stopping when |u^{l+1} - u^l|_inf <= tol.  ``F`` collects every spatial
term of the momentum equation (see ``momentum_flux``).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .mesh import (
    HelmholtzSolver,
    PeriodicGrid,
    apply_helmholtz,
    coupling_flux,
    second_diff,
)

log = logging.getLogger(__name__)


class NonConvergence(RuntimeError):
    """Picard iteration failed to reach tolerance (or produced non-finite values)."""

    def __init__(self, message, *, n=None, t=None, iterations=None, increment=None):
        super().__init__(message)
        self.n = n
        self.t = t
        self.iterations = iterations
        self.increment = increment


@dataclass(frozen=True)
class Parameters:
    A: float = 0.0
    mu: float = 0.0
    sigma: float = 1.0
    Omega: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.Omega < 0.25:
            raise ValueError(f"Omega must lie in [0, 1/4), got {self.Omega}")
        for name in ("A", "mu", "sigma"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def height_coeff(self) -> float:
        """1 - 2*Omega*A, the weight of the rho^2 terms."""
        return 1.0 - 2.0 * self.Omega * self.A


@dataclass(frozen=True)
class SolverConfig:
    tau: float
    tol: float = 1e-12
    max_iter: int = 200
    viscosity_enabled: bool = False
    epsilon: float = 1e-5
    residual_check: bool = False

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter}")


@dataclass(frozen=True, eq=False)
class State:
    grid: PeriodicGrid
    t: float
    u: np.ndarray
    rho: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        for name in ("u", "rho", "m"):
            arr = np.array(self.grid.check(getattr(self, name), name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def from_fields(cls, grid: PeriodicGrid, u, rho, t: float = 0.0) -> "State":
        u = np.asarray(u, dtype=float)
        return cls(grid, t, u, np.asarray(rho, dtype=float), apply_helmholtz(u, grid.h))

    def helmholtz_defect(self) -> float:
        return float(np.max(np.abs(apply_helmholtz(self.u, self.grid.h) - self.m)))


@dataclass(frozen=True)
class StepReport:
    iterations: int
    final_increment: float
    residual_m: float
    residual_rho: float
    viscosity_active_nodes: int


def momentum_flux(u, m, rho, h: float, p: Parameters) -> np.ndarray:
    """All spatial terms of the momentum equation, moved to the left-hand side."""
    up, um = np.roll(u, -1), np.roll(u, 1)
    upp, umm = np.roll(u, -2), np.roll(u, 2)
    rp, rm = np.roll(rho, -1), np.roll(rho, 1)
    out = (p.sigma / (2 * h)) * ((np.roll(m, -1) * up - np.roll(m, 1) * um) + m * (up - um))
    if p.sigma != 1.0:
        out += (3 * (1 - p.sigma) / (4 * h)) * (up * up - um * um)
    out -= (p.A / (2 * h)) * (up - um)
    out += (p.mu / (2 * h**3)) * (upp - 2 * up + 2 * um - umm)
    out += (p.height_coeff / (4 * h)) * (rp * rp - rm * rm)
    out -= (p.Omega / (2 * h)) * rho * coupling_flux(u, rho)
    return out


def viscosity_terms(ustar, rhostar, epsilon: float, h: float, latched=None):
    """Threshold viscosity R^u, R^rho and the two activity masks.

    A node is active when its undivided second difference satisfies
    |w[i+1] - 2w[i] + w[i-1]| >= epsilon*h; there R = (second difference)/(2h).
    ``latched`` is an optional pair of masks OR-ed into the indicators.
    """
    du = second_diff(np.asarray(ustar, dtype=float))
    dr = second_diff(np.asarray(rhostar, dtype=float))
    thr = epsilon * h
    on_u = np.abs(du) >= thr
    on_r = np.abs(dr) >= thr
    if latched is not None:
        on_u |= latched[0]
        on_r |= latched[1]
    Ru = np.where(on_u, du / (2 * h), 0.0)
    Rr = np.where(on_r, dr / (2 * h), 0.0)
    return Ru, Rr, on_u, on_r


def momentum_residual(star, prev: State, p: Parameters, cfg: SolverConfig, latched=None) -> np.ndarray:
    ustar, rhostar, mstar = star
    h = prev.grid.h
    res = (mstar - prev.m) / (cfg.tau / 2) + momentum_flux(ustar, mstar, rhostar, h, p)
    if cfg.viscosity_enabled:
        Ru, _, _, _ = viscosity_terms(ustar, rhostar, cfg.epsilon, h, latched)
        res = res - Ru
    return res


def density_residual(star, prev: State, cfg: SolverConfig, latched=None) -> np.ndarray:
    ustar, rhostar, _ = star
    h = prev.grid.h
    res = (rhostar - prev.rho) / (cfg.tau / 2) + coupling_flux(ustar, rhostar) / (4 * h)
    if cfg.viscosity_enabled:
        _, Rr, _, _ = viscosity_terms(ustar, rhostar, cfg.epsilon, h, latched)
        res = res - Rr
    return res


def picard_solve(prev: State, p: Parameters, cfg: SolverConfig, solver: HelmholtzSolver | None = None):
    """Fixed-point solve for the star variables. Returns (u*, rho*, m*, StepReport).

    With viscosity on, a node whose indicator fires stays active for the
    remaining sweeps of the step; otherwise borderline nodes can toggle every
    sweep and trap the iteration in a 2-cycle.
    """
    grid = prev.grid
    h, half = grid.h, cfg.tau / 2
    solver = solver or HelmholtzSolver(grid, check_residual=False)

    u, rho, m = prev.u, prev.rho, prev.m
    increment = math.inf
    active = 0
    latched = (np.zeros(grid.M, bool), np.zeros(grid.M, bool)) if cfg.viscosity_enabled else None
    for it in range(1, cfg.max_iter + 1):
        if cfg.viscosity_enabled:
            Ru, Rr, on_u, on_r = viscosity_terms(u, rho, cfg.epsilon, h, latched)
            latched = (on_u, on_r)
            active = int(np.count_nonzero(on_u | on_r))
        rho_new = prev.rho - (cfg.tau / (8 * h)) * coupling_flux(u, rho)
        if cfg.viscosity_enabled:
            rho_new = rho_new + half * Rr
        m_new = prev.m - half * momentum_flux(u, m, rho_new, h, p)
        if cfg.viscosity_enabled:
            m_new = m_new + half * Ru
        u_new = solver(m_new)

        increment = float(np.max(np.abs(u_new - u)))
        if not (math.isfinite(increment) and np.all(np.isfinite(rho_new))):
            raise NonConvergence(
                f"non-finite iterate at t={prev.t:g} after {it} sweeps",
                t=prev.t, iterations=it, increment=increment,
            )
        u, rho, m = u_new, rho_new, m_new
        if increment <= cfg.tol:
            break
    else:
        raise NonConvergence(
            f"Picard iteration did not converge at t={prev.t:g}: "
            f"increment {increment:.3e} > tol {cfg.tol:g} after {cfg.max_iter} sweeps",
            t=prev.t, iterations=cfg.max_iter, increment=increment,
        )

    star = (u, rho, m)
    res_m = float(np.max(np.abs(momentum_residual(star, prev, p, cfg, latched))))
    res_r = float(np.max(np.abs(density_residual(star, prev, cfg, latched))))
    if cfg.residual_check:
        bound = 10 * cfg.tol / cfg.tau
        if res_m > bound or res_r > bound:
            raise NonConvergence(
                f"false convergence at t={prev.t:g}: residuals m={res_m:.3e}, rho={res_r:.3e} exceed {bound:.3e}",
                t=prev.t, iterations=it, increment=increment,
            )
    return u, rho, m, StepReport(it, increment, res_m, res_r, active)


def step(prev: State, p: Parameters, cfg: SolverConfig, solver: HelmholtzSolver | None = None):
    """Advance one time level. Returns (State, StepReport)."""
    ustar, rhostar, _, report = picard_solve(prev, p, cfg, solver)
    u_next = 2 * ustar - prev.u
    rho_next = 2 * rhostar - prev.rho
    m_next = apply_helmholtz(u_next, prev.grid.h)
    return State(prev.grid, prev.t + cfg.tau, u_next, rho_next, m_next), report


Observer = Callable[[int, State, "StepReport | None"], None]


@dataclass
class Trajectory:
    """Stored time levels of one run.

    ``u[k]`` and ``rho[k]`` belong to level ``levels[k]`` (time ``times[k]``);
    ``reports[n-1]`` describes the step that produced level ``n``.
    """

    grid: PeriodicGrid
    tau: float
    params: Parameters
    levels: list[int] = field(default_factory=list)
    times: list[float] = field(default_factory=list)
    u: list[np.ndarray] = field(default_factory=list)
    rho: list[np.ndarray] = field(default_factory=list)
    reports: list[StepReport] = field(default_factory=list)
    final: State | None = None

    def store(self, n: int, s: State):
        self.levels.append(n)
        self.times.append(s.t)
        self.u.append(s.u)
        self.rho.append(s.rho)

    def state(self, k: int) -> State:
        return State.from_fields(self.grid, self.u[k], self.rho[k], self.times[k])

    @property
    def n_steps(self) -> int:
        return len(self.reports)

    def u_array(self) -> np.ndarray:
        return np.array(self.u)

    def rho_array(self) -> np.ndarray:
        return np.array(self.rho)


def steps_for(t0: float, t_end: float, tau: float, rtol: float = 1e-9) -> int:
    """Number of steps N with t0 + N*tau = t_end; raises if none exists."""
    span = t_end - t0
    if span < -abs(tau) * rtol:
        raise ValueError(f"t_end={t_end} precedes the initial time {t0}; backward runs are not supported")
    n = round(span / tau)
    if abs(n * tau - span) > rtol * max(abs(span), abs(tau)):
        raise ValueError(f"t_end - t0 = {span} is not an integer multiple of tau = {tau}")
    return int(n)


def run(
    initial: State,
    p: Parameters,
    cfg: SolverConfig,
    t_end: float,
    observers: Iterable[Observer] = (),
    store_levels: Sequence[int] | None = None,
    store_every: int = 1,
) -> Trajectory:
    """Take N = (t_end - t0)/tau steps from ``initial``.

    Levels 0 and N are always stored; in between, either the explicit
    ``store_levels`` or every ``store_every``-th level.  Each observer is
    called as ``obs(n, state, report)`` for n = 0..N (report is None at n=0).
    """
    N = steps_for(initial.t, t_end, cfg.tau)
    observers = list(observers)
    wanted = None if store_levels is None else set(int(k) for k in store_levels)

    def keep(n):
        if n == 0 or n == N:
            return True
        return (n in wanted) if wanted is not None else (store_every > 0 and n % store_every == 0)

    traj = Trajectory(initial.grid, cfg.tau, p)
    solver = HelmholtzSolver(initial.grid, check_residual=False)
    s = initial
    traj.store(0, s)
    for obs in observers:
        obs(0, s, None)
    for n in range(1, N + 1):
        try:
            s, rep = step(s, p, cfg, solver)
        except NonConvergence as exc:
            exc.n = n
            log.error("run aborted at level %d (t=%g): %s", n, initial.t + n * cfg.tau, exc)
            raise
        # exact t keeps snapshot times free of accumulated rounding
        s = State(s.grid, initial.t + n * cfg.tau, s.u, s.rho, s.m)
        traj.reports.append(rep)
        if keep(n):
            traj.store(n, s)
        for obs in observers:
            obs(n, s, rep)
    traj.final = s
    return traj
