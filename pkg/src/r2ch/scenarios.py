"""Initial data for the benchmark problems and the named preset catalog."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .mesh import PeriodicGrid
from .scheme import Parameters, SolverConfig, State

# ---------------------------------------------------------------- parameter cases

SMOOTH_CASES = {
    "I": dict(a=0.1, params=Parameters(A=0.0, mu=0.0, sigma=1.0, Omega=0.0), domain=(-6.0, 6.0), T=20.0),
    "II": dict(a=4.0, params=Parameters(A=0.0, mu=0.0, sigma=1.0, Omega=0.0), domain=(-12 * math.pi, 12 * math.pi), T=2.0),
    "III": dict(a=0.1, params=Parameters(A=0.1, mu=0.1, sigma=1.0, Omega=73e-6), domain=(-8.0, 8.0), T=1.0),
    "IV": dict(a=4.0, params=Parameters(A=1.0, mu=1.0, sigma=1.0, Omega=73e-6), domain=(-12 * math.pi, 12 * math.pi), T=2.0),
}

NONSMOOTH_CASES = {
    "I": Parameters(A=0.0, mu=0.0, sigma=1.0, Omega=0.0),
    "II": Parameters(A=0.0, mu=0.0, sigma=1.0, Omega=0.1),
    "III": Parameters(A=1.0, mu=1.0, sigma=1.0, Omega=73e-6),
}

# ---------------------------------------------------------------- closed forms


def periodic_distance(x, center: float, L: float):
    """|x - center| measured on the circle of circumference L."""
    d = np.abs(np.asarray(x, dtype=float) - center) % L
    return np.minimum(d, L - d)


def _reduce(d, L: float):
    """Map d into [-L/2, L/2)."""
    return (np.asarray(d, dtype=float) + L / 2) % L - L / 2


def periodic_peakon(c: float, x_center: float, L: float, x):
    """Two-branch periodic cosh profile, evaluated after reducing x - x_center mod L."""
    if not L > 0:
        raise ValueError("L must be positive")
    d = _reduce(np.asarray(x, dtype=float) - x_center, L)
    scale = c / math.cosh(L / 2)
    # after reduction |d| <= L/2, so the second branch only guards round-off at the seam
    return np.where(np.abs(d) <= L / 2, scale * np.cosh(d), scale * np.cosh(L - d))


def dam_break_init(a: float, grid: PeriodicGrid) -> State:
    x = grid.x
    rho = 1.0 + np.tanh(x + a) - np.tanh(x - a)
    return State.from_fields(grid, np.zeros(grid.M), rho)


THREE_PEAKON = dict(c=(2.0, 1.0, 0.8), x=(-5.0, -3.0, -1.0))


def three_peakon_init(grid: PeriodicGrid, c=THREE_PEAKON["c"], centers=THREE_PEAKON["x"]) -> State:
    L = grid.length
    u = sum(periodic_peakon(ci, xi, L, grid.x) for ci, xi in zip(c, centers))
    return State.from_fields(grid, u, np.zeros(grid.M))


def single_peakon_init(x0: float, grid: PeriodicGrid, rho0: float = 0.5) -> State:
    u = np.exp(-periodic_distance(grid.x, x0, grid.length))
    return State.from_fields(grid, u, np.full(grid.M, rho0))


def _sinh_branches(x):
    s4 = math.sinh(0.25)
    return (
        np.sinh(x) / (2 * s4),
        np.sinh(x - 0.5) / math.sinh(-0.5),
        np.sinh(x - 1.0) / (2 * s4),
    )


def piecewise_sinh_value(x: float) -> float:
    """Pointwise piecewise-sinh profile on [0, 1) (closed ends as printed: [0,1/4], (1/4,3/4], (3/4,1))."""
    left, mid, right = (float(b) for b in _sinh_branches(x))
    if 0.0 <= x <= 0.25:
        return left
    if 0.25 < x <= 0.75:
        return mid
    if 0.75 < x < 1.0:
        return right
    raise ValueError(f"x={x} outside [0, 1)")


def piecewise_sinh_init(grid: PeriodicGrid, rho0: float = 1.5) -> State:
    # branch membership by exact rational node position, so x_i = 1/4 lands in the closed branch
    x = grid.x
    left, mid, right = _sinh_branches(x)
    u = np.empty(grid.M)
    lo, span = Fraction(grid.xmin), Fraction(grid.xmax) - Fraction(grid.xmin)
    for i in range(grid.M):
        xi = lo + span * Fraction(i, grid.M)
        if 0 <= xi <= Fraction(1, 4):
            u[i] = left[i]
        elif Fraction(1, 4) < xi <= Fraction(3, 4):
            u[i] = mid[i]
        elif Fraction(3, 4) < xi < 1:
            u[i] = right[i]
        else:
            raise ValueError("piecewise sinh data is defined on [0, 1)")
    return State.from_fields(grid, u, np.full(grid.M, rho0))


def two_peakon_init(p1: float, p2: float, x1: float, x2: float, grid: PeriodicGrid, rho0: float = 0.5) -> State:
    L = grid.length
    u = p1 * np.exp(-periodic_distance(grid.x, x1, L)) + p2 * np.exp(-periodic_distance(grid.x, x2, L))
    return State.from_fields(grid, u, np.full(grid.M, rho0))


def constant_init(grid: PeriodicGrid, u0: float = 0.0, rho0: float = 0.0) -> State:
    return State.from_fields(grid, np.full(grid.M, float(u0)), np.full(grid.M, float(rho0)))


# ---------------------------------------------------------------- scenario specs

KINDS = ("dam_break", "three_peakon_ch", "single_peakon", "piecewise_sinh", "two_peakon", "constant")


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    domain: tuple[float, float]
    params: Parameters = field(default_factory=Parameters)
    options: dict = field(default_factory=dict)
    rho_background: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}; expected one of {KINDS}")
        if not self.domain[1] > self.domain[0]:
            raise ValueError(f"degenerate domain {self.domain}")

    def grid(self, M: int) -> PeriodicGrid:
        return PeriodicGrid(self.domain[0], self.domain[1], M)

    def initial_state(self, grid: PeriodicGrid) -> State:
        o = self.options
        if self.kind == "dam_break":
            return dam_break_init(o["a"], grid)
        if self.kind == "three_peakon_ch":
            return three_peakon_init(grid, o.get("c", THREE_PEAKON["c"]), o.get("x", THREE_PEAKON["x"]))
        if self.kind == "single_peakon":
            return single_peakon_init(o.get("x0", 10.0), grid, self.rho_background)
        if self.kind == "piecewise_sinh":
            return piecewise_sinh_init(grid, self.rho_background)
        if self.kind == "two_peakon":
            return two_peakon_init(o.get("p1", 1.0), o.get("p2", -1.0), o.get("x1", -5.0), o.get("x2", 5.0),
                                   grid, self.rho_background)
        return constant_init(grid, o.get("u0", 0.0), self.rho_background)


@dataclass(frozen=True)
class Preset:
    name: str
    scenario: ScenarioSpec
    M: int
    solver: SolverConfig
    t_end: float
    note: str = ""

    @property
    def N(self) -> int:
        return round(self.t_end / self.solver.tau)

    @property
    def grid(self) -> PeriodicGrid:
        return self.scenario.grid(self.M)

    def initial_state(self) -> State:
        return self.scenario.initial_state(self.grid)


def _build_catalog() -> dict[str, Preset]:
    cat: dict[str, Preset] = {}

    def add(name, scenario, M, tau, t_end, note="", **solver):
        cat[name] = Preset(name, scenario, M, SolverConfig(tau=tau, **solver), t_end, note)

    # dam break; the plain case names are the base rung of the convergence ladders (M=100, N=100)
    table5 = {"I": (200, 0.01, 10.0), "II": (150, 0.005, 10.0), "III": (100, 0.0025, 5.0), "IV": (170, 0.0025, 5.0)}
    for case, c in SMOOTH_CASES.items():
        spec = ScenarioSpec("dam_break", c["domain"], c["params"], {"a": c["a"]})
        add(f"smooth-{case}", spec, 100, c["T"] / 100, c["T"], "dam break; M=100, N=100 over the case horizon")
        M5, tau5, T5 = table5[case]
        add(f"smooth-{case}-table5", spec, M5, tau5, T5, "dam break at the conservation-table resolution")
    # profile snapshots at t=2 and long runs
    for case in ("II", "IV"):
        c = SMOOTH_CASES[case]
        spec = ScenarioSpec("dam_break", c["domain"], c["params"], {"a": c["a"]})
        add(f"smooth-{case}-profile", spec, 800, 0.005, 2.0, "dam break profiles at t=2")
        add(f"smooth-{case}-long", spec, 400, 0.01, 50.0, "dam break long run to t=50")
    # H monitoring runs, h = 0.5, tau = 0.005 (M = 150 on the 24*pi domain, as in the conservation table)
    for case, M in (("I", 24), ("II", 150)):
        c = SMOOTH_CASES[case]
        spec = ScenarioSpec("dam_break", c["domain"], c["params"], {"a": c["a"]})
        add(f"smooth-{case}-H", spec, M, 0.005, 10.0, "H monitoring")

    visc = dict(viscosity_enabled=True, epsilon=1e-5)
    # three peakons of the CH equation (rho = 0)
    add("three-peakon", ScenarioSpec("three_peakon_ch", (0.0, 30.0), NONSMOOTH_CASES["I"]),
        2048, 1e-4, 10.0, "CH three-peakon interaction", **visc)
    # single peakon, h = 0.025, tau = 0.0005
    for case in ("I", "III"):
        spec = ScenarioSpec("single_peakon", (0.0, 20.0), NONSMOOTH_CASES[case], {"x0": 10.0}, rho_background=0.5)
        add(f"single-peakon-{case}", spec, 800, 0.0005, 5.0, "single peakon", **visc)
    # piecewise sinh data on [0, 1]
    for case, tau in (("I", 0.001), ("II", 0.0005)):
        spec = ScenarioSpec("piecewise_sinh", (0.0, 1.0), NONSMOOTH_CASES[case], rho_background=1.5)
        add(f"sinh-{case}", spec, 500, tau, 1.0, "piecewise sinh peakon/anti-peakon, h=0.002", **visc)
        add(f"sinh-{case}-coarse", spec, 50, 0.0005, 1.0, "conserved quantities, h=0.02", **visc)
    add("sinh-I-H", ScenarioSpec("piecewise_sinh", (0.0, 1.0), NONSMOOTH_CASES["I"], rho_background=1.5),
        5, 0.0025, 1.0, "H monitoring, h=0.2", **visc)
    # peakon / anti-peakon on [-20, 20]
    pk = {"p1": 1.0, "p2": -1.0, "x1": -5.0, "x2": 5.0}
    for case in ("I", "III"):
        spec = ScenarioSpec("two_peakon", (-20.0, 20.0), NONSMOOTH_CASES[case], pk, rho_background=0.5)
        add(f"two-peakon-{case}", spec, 800, 0.0005, 10.0, "exponential peakon/anti-peakon, h=0.05", **visc)
        add(f"two-peakon-{case}-long", spec, 800, 0.0005, 35.0, "long run to t=35", **visc)
    add("two-peakon-I-H", ScenarioSpec("two_peakon", (-20.0, 20.0), NONSMOOTH_CASES["I"], pk, rho_background=0.5),
        200, 0.0025, 10.0, "H monitoring, h=0.2", **visc)

    # the bare nonsmooth parameter cases, each attached to the example that uses it
    cat["nonsmooth-I"] = _renamed(cat["single-peakon-I"], "nonsmooth-I")
    cat["nonsmooth-II"] = _renamed(cat["sinh-II"], "nonsmooth-II")
    cat["nonsmooth-III"] = _renamed(cat["single-peakon-III"], "nonsmooth-III")

    add("zero", ScenarioSpec("constant", (0.0, 1.0)), 16, 0.1, 1.0, "zero state (smoke test)")
    return cat


def _renamed(p: Preset, name: str) -> Preset:
    return Preset(name, p.scenario, p.M, p.solver, p.t_end, p.note)


PRESETS = _build_catalog()


def preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}") from None
