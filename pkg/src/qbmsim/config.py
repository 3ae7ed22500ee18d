"""Run configuration: dataclasses plus a TOML-or-JSON loader.

The file format is sniffed (JSON documents start with '{'), everything else
goes through the TOML parser.  Defaults mirror the reference setup:
400 bath modes, omega_max = cutoff = 40, k_B T = 10, 2000 time points on
[0, t_max], pulse duration t_max / 2.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .model import DrivePulse, ModelSpec

DEFAULT_OBSERVABLES = frozenset({"thermo", "decomposition", "negativity"})
VALID_OBSERVABLES = DEFAULT_OBSERVABLES
VALID_FORMATS = ("csv", "json")


def _require_keys(section: Mapping[str, Any], allowed: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in [{where}]")


def _as_float(section: Mapping[str, Any], key: str, default: float, where: str) -> float:
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number, got {value!r}")
    return float(value)


def _as_int(section: Mapping[str, Any], key: str, default: int, where: str) -> int:
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}.{key} must be an integer, got {value!r}")
    return value


def model_spec_from_dict(section: Mapping[str, Any]) -> ModelSpec:
    """Build a ModelSpec from the [model] section; drive.t_f is accepted in
    time units and converted to the envelope frequency pi / t_f."""
    _require_keys(
        section,
        {"n_modes", "omega0", "omega_max", "gamma", "cutoff", "temperature", "drive"},
        "model",
    )
    n_modes = _as_int(section, "n_modes", 400, "model")
    omega0 = _as_float(section, "omega0", 1.0, "model")
    omega_max = _as_float(section, "omega_max", 40.0, "model")
    gamma = _as_float(section, "gamma", 0.1, "model")
    cutoff = _as_float(section, "cutoff", omega_max, "model")
    temperature = _as_float(section, "temperature", 10.0, "model")

    drive_section = section.get("drive", {})
    if not isinstance(drive_section, Mapping):
        raise ConfigError(f"model.drive must be a table, got {drive_section!r}")
    _require_keys(drive_section, {"f0", "omega_f", "t_f", "phi"}, "model.drive")
    if n_modes >= 1 and omega_max > 0:
        default_t_f = math.pi * n_modes / omega_max  # half the recurrence time
    else:
        default_t_f = 1.0
    f0 = _as_float(drive_section, "f0", 0.0, "model.drive")
    omega_f = _as_float(drive_section, "omega_f", 1.2, "model.drive")
    t_f = _as_float(drive_section, "t_f", default_t_f, "model.drive")
    phi = _as_float(drive_section, "phi", 0.0, "model.drive")
    if t_f <= 0:
        raise ConfigError(f"model.drive.t_f must be positive, got {t_f}")

    try:
        drive = DrivePulse(f0=f0, omega_f=omega_f, omega_env=math.pi / t_f, phi=phi)
        return ModelSpec(
            n_modes=n_modes,
            omega0=omega0,
            omega_max=omega_max,
            gamma=gamma,
            cutoff=cutoff,
            temperature=temperature,
            drive=drive,
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


@dataclass(frozen=True)
class RunConfig:
    """One time-series run: model, grid, observable toggles, output."""

    spec: ModelSpec
    t_end: float | None = None
    n_points: int = 2000
    observables: frozenset[str] = DEFAULT_OBSERVABLES
    out: Path | None = None
    fmt: str = "csv"
    threads: int = 1
    gibbs_frequency: str = "renormalized"

    def __post_init__(self) -> None:
        if self.n_points < 2:
            raise ConfigError(f"n_points must be at least 2, got {self.n_points}")
        if self.fmt not in VALID_FORMATS:
            raise ConfigError(f"format must be one of {VALID_FORMATS}, got {self.fmt!r}")
        bad = set(self.observables) - VALID_OBSERVABLES
        if bad:
            raise ConfigError(f"unknown observable(s) {sorted(bad)}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if self.gibbs_frequency not in ("renormalized", "bare"):
            raise ConfigError(f"gibbs_frequency must be 'renormalized' or 'bare'")


def _grid_from(value: Any, default: tuple[float, float, int], where: str) -> np.ndarray:
    if value is None:
        lo, hi, count = default
        return np.linspace(lo, hi, count)
    if isinstance(value, (list, tuple)):
        if not value:
            raise ConfigError(f"{where} grid must be nonempty")
        return np.asarray([float(v) for v in value], dtype=float)
    if isinstance(value, Mapping):
        _require_keys(value, {"min", "max", "count"}, where)
        lo = _as_float(value, "min", default[0], where)
        hi = _as_float(value, "max", default[1], where)
        count = _as_int(value, "count", default[2], where)
        if count < 1 or hi < lo:
            raise ConfigError(f"invalid {where} grid: min={lo}, max={hi}, count={count}")
        return np.linspace(lo, hi, count)
    raise ConfigError(f"{where} must be a list or a min/max/count table, got {value!r}")


@dataclass(frozen=True)
class SweepConfig:
    """Grid of (gamma, temperature) cells evaluated at one time."""

    base: ModelSpec
    gammas: np.ndarray = field(default_factory=lambda: np.linspace(0.0, 2.0, 60))
    temperatures: np.ndarray = field(default_factory=lambda: np.linspace(0.0, 5.0, 60))
    eval_time: float | None = None
    out: Path | None = None
    threads: int = 1

    def __post_init__(self) -> None:
        if len(self.gammas) == 0 or len(self.temperatures) == 0:
            raise ConfigError("sweep grids must be nonempty")
        if np.any(np.asarray(self.gammas) < 0) or np.any(np.asarray(self.temperatures) < 0):
            raise ConfigError("sweep grids must be nonnegative")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")


@dataclass(frozen=True)
class NegativityStudyConfig:
    """Logarithmic-negativity study: one trajectory per parameter value,
    always undriven."""

    base: ModelSpec
    parameter: str = "temperature"
    values: tuple[float, ...] = (0.05, 0.1, 0.5, 1.0)
    t_end: float | None = None
    n_points: int = 2000
    out: Path | None = None
    threads: int = 1

    def __post_init__(self) -> None:
        if self.parameter not in ("temperature", "gamma"):
            raise ConfigError(f"negativity parameter must be 'temperature' or 'gamma'")
        if not self.values:
            raise ConfigError("negativity values must be nonempty")
        if self.n_points < 2 or self.threads < 1:
            raise ConfigError("invalid n_points or threads")


@dataclass(frozen=True)
class CompareConfig:
    """Definition-comparison study across a coupling ladder."""

    base: ModelSpec
    gammas: tuple[float, ...] = (0.1, 0.01, 0.001)
    t_end: float | None = None
    n_points: int = 2000
    out: Path | None = None
    threads: int = 1

    def __post_init__(self) -> None:
        if not self.gammas:
            raise ConfigError("compare gammas must be nonempty")
        if self.n_points < 2 or self.threads < 1:
            raise ConfigError("invalid n_points or threads")


def load_config_dict(path: str | Path) -> dict[str, Any]:
    """Read a TOML or JSON config file (format sniffed from the content)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    stripped = text.lstrip()
    try:
        if stripped.startswith("{"):
            data = json.loads(text)
        else:
            data = tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config root must be a table/object, got {type(data).__name__}")
    return data


def _top_level_check(data: Mapping[str, Any]) -> None:
    _require_keys(data, {"model", "run", "sweep", "negativity", "compare"}, "config")


def run_config_from_dict(data: Mapping[str, Any]) -> RunConfig:
    _top_level_check(data)
    spec = model_spec_from_dict(data.get("model", {}))
    section = data.get("run", {})
    _require_keys(
        section,
        {"t_end", "n_points", "observables", "out", "format", "threads", "gibbs_frequency"},
        "run",
    )
    t_end = section.get("t_end")
    if t_end is not None:
        t_end = _as_float(section, "t_end", 0.0, "run")
    observables = section.get("observables")
    if observables is None:
        observables = DEFAULT_OBSERVABLES
    elif isinstance(observables, (list, tuple)):
        observables = frozenset(str(o) for o in observables)
    else:
        raise ConfigError(f"run.observables must be a list, got {observables!r}")
    out = section.get("out")
    return RunConfig(
        spec=spec,
        t_end=t_end,
        n_points=_as_int(section, "n_points", 2000, "run"),
        observables=observables,
        out=Path(out) if out is not None else None,
        fmt=str(section.get("format", "csv")),
        threads=_as_int(section, "threads", 1, "run"),
        gibbs_frequency=str(section.get("gibbs_frequency", "renormalized")),
    )


def sweep_config_from_dict(data: Mapping[str, Any]) -> SweepConfig:
    _top_level_check(data)
    base = model_spec_from_dict(data.get("model", {}))
    section = data.get("sweep", {})
    _require_keys(section, {"gamma", "temperature", "eval_time", "out", "threads"}, "sweep")
    eval_time = section.get("eval_time")
    if eval_time is not None:
        eval_time = _as_float(section, "eval_time", 0.0, "sweep")
    out = section.get("out")
    return SweepConfig(
        base=base,
        gammas=_grid_from(section.get("gamma"), (0.0, 2.0, 60), "sweep.gamma"),
        temperatures=_grid_from(section.get("temperature"), (0.0, 5.0, 60), "sweep.temperature"),
        eval_time=eval_time,
        out=Path(out) if out is not None else None,
        threads=_as_int(section, "threads", 1, "sweep"),
    )


def negativity_config_from_dict(data: Mapping[str, Any]) -> NegativityStudyConfig:
    _top_level_check(data)
    base = model_spec_from_dict(data.get("model", {}))
    section = data.get("negativity", {})
    _require_keys(section, {"parameter", "values", "t_end", "n_points", "out", "threads"}, "negativity")
    t_end = section.get("t_end")
    if t_end is not None:
        t_end = _as_float(section, "t_end", 0.0, "negativity")
    values = section.get("values")
    out = section.get("out")
    kwargs = {}
    if values is not None:
        if not isinstance(values, (list, tuple)):
            raise ConfigError(f"negativity.values must be a list, got {values!r}")
        kwargs["values"] = tuple(float(v) for v in values)
    return NegativityStudyConfig(
        base=base,
        parameter=str(section.get("parameter", "temperature")),
        t_end=t_end,
        n_points=_as_int(section, "n_points", 2000, "negativity"),
        out=Path(out) if out is not None else None,
        threads=_as_int(section, "threads", 1, "negativity"),
        **kwargs,
    )


def compare_config_from_dict(data: Mapping[str, Any]) -> CompareConfig:
    _top_level_check(data)
    base = model_spec_from_dict(data.get("model", {}))
    section = data.get("compare", {})
    _require_keys(section, {"gammas", "t_end", "n_points", "out", "threads"}, "compare")
    t_end = section.get("t_end")
    if t_end is not None:
        t_end = _as_float(section, "t_end", 0.0, "compare")
    gammas = section.get("gammas")
    out = section.get("out")
    kwargs = {}
    if gammas is not None:
        if not isinstance(gammas, (list, tuple)) or not gammas:
            raise ConfigError(f"compare.gammas must be a nonempty list, got {gammas!r}")
        kwargs["gammas"] = tuple(float(g) for g in gammas)
    return CompareConfig(
        base=base,
        t_end=t_end,
        n_points=_as_int(section, "n_points", 2000, "compare"),
        out=Path(out) if out is not None else None,
        threads=_as_int(section, "threads", 1, "compare"),
        **kwargs,
    )
