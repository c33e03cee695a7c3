"""Run configuration: a YAML (or JSON) key-value document.

Example::

    preset: smooth-I-table5        # or an inline `scenario:` mapping
    M: 200                         # optional, defaults to the preset
    t_end: 10.0                    # any two of N / tau / t_end fix the third
    solver:
      tau: 0.01
      tol: 1.0e-13
      max_iter: 200
      viscosity: false
      epsilon: 1.0e-5
      residual_check: false
    outputs:
      snapshot_times: [0, 2, 4, 6, 8, 10]
      conserved_every: 100
      output_dir: out
      format: csv
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import yaml

from .scenarios import KINDS, PRESETS, ScenarioSpec
from .scheme import Parameters, SolverConfig

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 200
DEFAULT_EPSILON = 1e-5


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


@dataclass(frozen=True)
class Outputs:
    snapshot_times: tuple[float, ...] = ()
    conserved_every: int = 1
    output_dir: str = "out"
    format: str = "csv"


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioSpec
    M: int
    N: int
    t_end: float
    solver: SolverConfig
    outputs: Outputs = field(default_factory=Outputs)
    preset: str | None = None

    @property
    def grid(self):
        return self.scenario.grid(self.M)

    def snapshot_levels(self) -> list[int]:
        return [round(t / self.solver.tau) for t in self.outputs.snapshot_times]


_TOP_KEYS = {"preset", "scenario", "M", "N", "t_end", "solver", "outputs"}
_SOLVER_KEYS = {"tau", "tol", "max_iter", "viscosity", "epsilon", "residual_check"}
_OUTPUT_KEYS = {"snapshot_times", "conserved_every", "output_dir", "format"}
_SCENARIO_KEYS = {"kind", "domain", "params", "options", "rho_background"}
_PARAM_KEYS = {"A", "mu", "sigma", "Omega"}


def _unknown(section: str, got: dict, allowed: set):
    extra = sorted(set(got) - allowed)
    if extra:
        where = f"{section}." if section else ""
        raise ConfigError(f"unknown key '{where}{extra[0]}' (allowed: {', '.join(sorted(allowed))})")


def _number(value, key: str, *, integer=False, positive=False, allow_none=False):
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{key}' must be a number, got {value!r}")
    if integer:
        if int(value) != value:
            raise ConfigError(f"'{key}' must be an integer, got {value!r}")
        value = int(value)
    elif not math.isfinite(value):
        raise ConfigError(f"'{key}' must be finite")
    if positive and not value > 0:
        raise ConfigError(f"'{key}' must be positive, got {value!r}")
    return value


def _section(doc: dict, key: str) -> dict:
    sec = doc.get(key) or {}
    if not isinstance(sec, dict):
        raise ConfigError(f"'{key}' must be a mapping")
    return sec


def _parse_scenario(sc: dict) -> ScenarioSpec:
    _unknown("scenario", sc, _SCENARIO_KEYS)
    kind = sc.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"'scenario.kind' must be one of {KINDS}, got {kind!r}")
    dom = sc.get("domain")
    if not (isinstance(dom, (list, tuple)) and len(dom) == 2):
        raise ConfigError("'scenario.domain' must be a pair [xmin, xmax]")
    lo = _number(dom[0], "scenario.domain")
    hi = _number(dom[1], "scenario.domain")
    if not hi > lo:
        raise ConfigError(f"'scenario.domain' is degenerate: {dom}")
    params = sc.get("params") or {}
    _unknown("scenario.params", params, _PARAM_KEYS)
    try:
        p = Parameters(**{k: float(_number(v, f"scenario.params.{k}")) for k, v in params.items()})
    except ValueError as exc:
        raise ConfigError(f"'scenario.params': {exc}") from None
    options = dict(sc.get("options") or {})
    rho_bg = float(_number(sc.get("rho_background", 0.0), "scenario.rho_background"))
    if kind == "dam_break" and "a" not in options:
        raise ConfigError("'scenario.options.a' is required for dam_break")
    return ScenarioSpec(kind, (float(lo), float(hi)), p, options, rho_bg)


def config_from_dict(doc: Any) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a key-value mapping")
    _unknown("", doc, _TOP_KEYS)
    if ("preset" in doc) == ("scenario" in doc):
        raise ConfigError("exactly one of 'preset' or 'scenario' is required")

    base = None
    if "preset" in doc:
        name = doc["preset"]
        if name not in PRESETS:
            raise ConfigError(f"'preset': unknown preset {name!r}")
        base = PRESETS[name]
        scenario = base.scenario
    else:
        scenario = _parse_scenario(_section(doc, "scenario"))

    sol = _section(doc, "solver")
    _unknown("solver", sol, _SOLVER_KEYS)
    out = _section(doc, "outputs")
    _unknown("outputs", out, _OUTPUT_KEYS)

    M = _number(doc.get("M", base.M if base else None), "M", integer=True, allow_none=True)
    if M is None:
        raise ConfigError("'M' is required when no preset is given")
    if M < 5:
        raise ConfigError(f"'M' must be at least 5, got {M}")

    tau = _number(sol.get("tau"), "solver.tau", positive=True, allow_none=True)
    N = _number(doc.get("N"), "N", integer=True, allow_none=True)
    t_end = _number(doc.get("t_end"), "t_end", allow_none=True)
    if N is not None and N < 0:
        raise ConfigError(f"'N' must be non-negative, got {N}")
    if t_end is not None and t_end < 0:
        raise ConfigError(f"'t_end' must be non-negative, got {t_end}")
    given = sum(v is not None for v in (N, tau, t_end))
    if given < 2 and base is not None:
        tau = tau if tau is not None else (base.solver.tau if N is None or t_end is None else None)
        t_end = t_end if t_end is not None else (base.t_end if N is None or tau is None else None)
        given = sum(v is not None for v in (N, tau, t_end))
    if given < 2:
        raise ConfigError("two of 'N', 'solver.tau', 't_end' are required")
    if tau is None:
        if N == 0:
            raise ConfigError("'solver.tau' is required when N = 0")
        tau = t_end / N
    elif N is None:
        ratio = t_end / tau
        N = round(ratio)
        if abs(N - ratio) > 1e-9 * max(1.0, ratio):
            raise ConfigError(f"'t_end' = {t_end} is not an integer multiple of 'solver.tau' = {tau}")
    elif t_end is None:
        t_end = N * tau
    if abs(N * tau - t_end) > 1e-12 * max(abs(t_end), tau):
        raise ConfigError(f"'N' * 'solver.tau' = {N * tau!r} differs from 't_end' = {t_end!r}")

    bsol = base.solver if base else None
    try:
        solver = SolverConfig(
            tau=float(tau),
            tol=float(_number(sol.get("tol", DEFAULT_TOL), "solver.tol", positive=True)),
            max_iter=_number(sol.get("max_iter", DEFAULT_MAX_ITER), "solver.max_iter", integer=True, positive=True),
            viscosity_enabled=_bool(sol.get("viscosity", bsol.viscosity_enabled if bsol else False), "solver.viscosity"),
            epsilon=float(_number(sol.get("epsilon", bsol.epsilon if bsol else DEFAULT_EPSILON), "solver.epsilon")),
            residual_check=_bool(sol.get("residual_check", False), "solver.residual_check"),
        )
    except ValueError as exc:
        raise ConfigError(f"'solver': {exc}") from None

    times = out.get("snapshot_times", [])
    if not isinstance(times, (list, tuple)):
        raise ConfigError("'outputs.snapshot_times' must be a list")
    times = tuple(float(_number(t, "outputs.snapshot_times")) for t in times)
    for t in times:
        if t < 0 or t > t_end * (1 + 1e-12):
            raise ConfigError(f"'outputs.snapshot_times' entry {t} lies outside [0, t_end={t_end}]")
        k = t / tau
        if abs(k - round(k)) > 1e-9 * max(1.0, k):
            raise ConfigError(f"'outputs.snapshot_times' entry {t} is not on the time grid (tau={tau})")
    fmt = out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"'outputs.format' must be 'csv' or 'json', got {fmt!r}")
    outputs = Outputs(
        snapshot_times=times,
        conserved_every=_number(out.get("conserved_every", 1), "outputs.conserved_every", integer=True, positive=True),
        output_dir=str(out.get("output_dir", "out")),
        format=fmt,
    )
    return RunConfig(scenario, int(M), int(N), float(t_end), solver, outputs, doc.get("preset"))


def _bool(value, key):
    if isinstance(value, bool):
        return value
    if value in ("on", "off"):
        return value == "on"
    raise ConfigError(f"'{key}' must be a boolean, got {value!r}")


def parse_config(text: str) -> RunConfig:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed configuration: {exc}") from None
    return config_from_dict(doc)


def config_to_dict(cfg: RunConfig) -> dict:
    doc: dict[str, Any] = {}
    if cfg.preset is not None:
        doc["preset"] = cfg.preset
    else:
        sc = cfg.scenario
        doc["scenario"] = {
            "kind": sc.kind,
            "domain": list(sc.domain),
            "params": {"A": sc.params.A, "mu": sc.params.mu, "sigma": sc.params.sigma, "Omega": sc.params.Omega},
            "options": dict(sc.options),
            "rho_background": sc.rho_background,
        }
    s = cfg.solver
    doc.update(
        M=cfg.M,
        N=cfg.N,
        t_end=cfg.t_end,
        solver={
            "tau": s.tau, "tol": s.tol, "max_iter": s.max_iter, "viscosity": s.viscosity_enabled,
            "epsilon": s.epsilon, "residual_check": s.residual_check,
        },
        outputs={
            "snapshot_times": list(cfg.outputs.snapshot_times),
            "conserved_every": cfg.outputs.conserved_every,
            "output_dir": cfg.outputs.output_dir,
            "format": cfg.outputs.format,
        },
    )
    return doc


def serialize_config(cfg: RunConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False)
