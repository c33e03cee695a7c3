"""Command line interface.

    r2ch run <config>
    r2ch conservation <config>
    r2ch convergence <config> --axis space|time --levels K
    r2ch presets

``<config>`` is a YAML/JSON file or the name of a preset.  Exit codes:
0 success, 2 configuration error, 3 solver non-convergence, 4 IO error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, RunConfig, config_from_dict, parse_config
from .scenarios import PRESETS
from .scheme import NonConvergence
from .studies import (
    LadderError,
    conservation_audit,
    conservation_text,
    convergence_study,
    execute,
    write_conserved,
    write_table,
)

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("r2ch")


def load_config(source: str) -> RunConfig:
    path = Path(source)
    if not path.exists() and source in PRESETS:
        return config_from_dict({"preset": source})
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {source!r}: {exc.strerror}") from None
    return parse_config(text)


def apply_overrides(cfg: RunConfig, args) -> RunConfig:
    solver, outputs = cfg.solver, cfg.outputs
    try:
        if args.tol is not None:
            solver = replace(solver, tol=args.tol)
        if args.viscosity is not None:
            solver = replace(solver, viscosity_enabled=args.viscosity == "on")
        if args.epsilon is not None:
            solver = replace(solver, epsilon=args.epsilon)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.output_dir is not None:
        outputs = replace(outputs, output_dir=args.output_dir)
    if args.format is not None:
        outputs = replace(outputs, format=args.format)
    return replace(cfg, solver=solver, outputs=outputs)


def cmd_run(cfg: RunConfig) -> int:
    result = execute(cfg)
    for path in result.files:
        print(path)
    return EXIT_OK


def cmd_conservation(cfg: RunConfig) -> int:
    series, summary = conservation_audit(cfg)
    text = conservation_text(series, summary)
    out = Path(cfg.outputs.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_conserved(out / f"conservation.{cfg.outputs.format}", series, cfg.outputs.format)
    write_table(out / "conservation.txt", text)
    print(text, end="")
    return EXIT_OK


def cmd_convergence(cfg: RunConfig, axis: str, levels: int) -> int:
    table = convergence_study(cfg, axis, levels)
    out = Path(cfg.outputs.output_dir)
    write_table(out / f"convergence_{axis}.csv", table.csv_text())
    write_table(out / f"convergence_{axis}.txt", table.text())
    print(table.text(), end="")
    return EXIT_OK


def cmd_presets() -> int:
    for name in sorted(PRESETS):
        p = PRESETS[name]
        sc = p.scenario
        print(f"{name:<22} {sc.kind:<16} [{sc.domain[0]:.6g}, {sc.domain[1]:.6g}]  M={p.M:<5} "
              f"tau={p.solver.tau:<8g} T={p.t_end:<5g} {p.note}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="YAML/JSON configuration file or preset name")
    common.add_argument("--output-dir")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--tol", type=float)
    common.add_argument("--viscosity", choices=("on", "off"))
    common.add_argument("--epsilon", type=float)

    parser = argparse.ArgumentParser(prog="r2ch", description="Conservative R2CH simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="simulate and write snapshots + conserved series")
    sub.add_parser("conservation", parents=[common], help="conserved quantities and drift summary")
    conv = sub.add_parser("convergence", parents=[common], help="posterior-error convergence ladder")
    conv.add_argument("--axis", choices=("space", "time"), required=True)
    conv.add_argument("--levels", type=int, default=4)
    sub.add_parser("presets", help="list the preset catalog")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "presets":
        return cmd_presets()
    try:
        cfg = apply_overrides(load_config(args.config), args)
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "conservation":
            return cmd_conservation(cfg)
        if args.levels < 2:
            raise ConfigError("'--levels' must be at least 2")
        return cmd_convergence(cfg, args.axis, args.levels)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergence as exc:
        where = f" at time level {exc.n}" if exc.n is not None else ""
        print(f"solver error{where}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except LadderError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
