"""Command-line interface.

Subcommands: simulate, map, negativity, compare-definitions.  Each takes an
optional --config file (TOML or JSON) plus override flags.  Exit codes:
0 success, 2 configuration error, 3 numerical-stability error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import (
    CompareConfig,
    NegativityStudyConfig,
    RunConfig,
    SweepConfig,
    compare_config_from_dict,
    load_config_dict,
    negativity_config_from_dict,
    run_config_from_dict,
    sweep_config_from_dict,
)
from .errors import ConfigError, StabilityError
from .experiments import (
    run_compare_definitions,
    run_contribution_map,
    run_negativity_study,
    run_timeseries,
)
from .model import DrivePulse, ModelSpec

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_STABILITY = 3


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="TOML or JSON config file")
    parser.add_argument("--gamma", type=float, help="override coupling constant")
    parser.add_argument("--temperature", type=float, help="override bath temperature (k_B T)")
    parser.add_argument("--f0", type=float, help="override drive amplitude")
    parser.add_argument("--omega-f", type=float, dest="omega_f", help="override drive frequency")
    parser.add_argument("--n-modes", type=int, dest="n_modes", help="override bath mode count")
    parser.add_argument("--out", type=Path, help="output file path")
    parser.add_argument("--format", choices=("csv", "json"), help="output format")
    parser.add_argument("--threads", type=int, help="worker threads")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qbmsim",
        description="Exact Gaussian simulator for a driven central oscillator in a finite "
        "harmonic bath: entropy production, its decomposition, and entanglement.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("simulate", "one time-series run with all requested observables"),
        ("map", "contribution colormap data over a (gamma, T) grid"),
        ("negativity", "negativity/mutual-information study over a parameter ladder"),
        ("compare-definitions", "entropy-production definitions across a coupling ladder"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        if name == "simulate":
            p.add_argument("--t-end", type=float, dest="t_end", help="final time")
            p.add_argument("--n-points", type=int, dest="n_points", help="time-grid size")
    return parser


def _spec_with_overrides(spec: ModelSpec, args: argparse.Namespace) -> ModelSpec:
    changes = {}
    for key in ("gamma", "temperature", "n_modes"):
        value = getattr(args, key, None)
        if value is not None:
            changes[key] = value
    drive = spec.drive
    if getattr(args, "f0", None) is not None:
        drive = replace(drive, f0=args.f0)
    if getattr(args, "omega_f", None) is not None:
        drive = replace(drive, omega_f=args.omega_f)
    if drive is not spec.drive:
        changes["drive"] = drive
    return replace(spec, **changes) if changes else spec


def _load(args: argparse.Namespace) -> dict:
    if args.config is not None:
        return load_config_dict(args.config)
    return {}


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = run_config_from_dict(_load(args))
    cfg = replace(
        cfg,
        spec=_spec_with_overrides(cfg.spec, args),
        t_end=args.t_end if args.t_end is not None else cfg.t_end,
        n_points=args.n_points if args.n_points is not None else cfg.n_points,
        out=args.out if args.out is not None else cfg.out,
        fmt=args.format if args.format is not None else cfg.fmt,
        threads=args.threads if args.threads is not None else cfg.threads,
    )
    if cfg.out is None:
        cfg = replace(cfg, out=Path("run.csv" if cfg.fmt == "csv" else "run.json"))
    records, _ = run_timeseries(cfg)
    print(f"wrote {len(records)} records to {cfg.out}")
    return EXIT_OK


def _cmd_map(args: argparse.Namespace) -> int:
    cfg = sweep_config_from_dict(_load(args))
    cfg = replace(
        cfg,
        base=_spec_with_overrides(cfg.base, args),
        out=args.out if args.out is not None else cfg.out,
        threads=args.threads if args.threads is not None else cfg.threads,
    )
    if cfg.out is None:
        cfg = replace(cfg, out=Path("map.csv"))
    cells = run_contribution_map(cfg)
    ok = sum(1 for c in cells if c.status == "ok")
    print(f"wrote {len(cells)} cells ({ok} ok) to {cfg.out}")
    return EXIT_OK


def _cmd_negativity(args: argparse.Namespace) -> int:
    cfg = negativity_config_from_dict(_load(args))
    cfg = replace(
        cfg,
        base=_spec_with_overrides(cfg.base, args),
        out=args.out if args.out is not None else cfg.out,
        threads=args.threads if args.threads is not None else cfg.threads,
    )
    if cfg.out is None:
        cfg = replace(cfg, out=Path("negativity.csv"))
    results = run_negativity_study(cfg)
    print(f"wrote {len(results)} parameter series to {cfg.out}")
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace) -> int:
    cfg = compare_config_from_dict(_load(args))
    base = _spec_with_overrides(cfg.base, args)
    gammas = (args.gamma,) if args.gamma is not None else cfg.gammas
    cfg = replace(
        cfg,
        base=base,
        gammas=tuple(gammas),
        out=args.out if args.out is not None else cfg.out,
        threads=args.threads if args.threads is not None else cfg.threads,
    )
    if cfg.out is None:
        cfg = replace(cfg, out=Path("compare.csv"))
    results = run_compare_definitions(cfg)
    print(f"wrote {len(results)} coupling series to {cfg.out}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "map": _cmd_map,
        "negativity": _cmd_negativity,
        "compare-definitions": _cmd_compare,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StabilityError as exc:
        print(f"numerical-stability error: {exc}", file=sys.stderr)
        return EXIT_STABILITY


if __name__ == "__main__":
    sys.exit(main())
