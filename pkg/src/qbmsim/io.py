"""Persistence: CSV/JSON writers with fixed schemas, plus the run manifest.

Floating-point values are printed with 17 significant digits, enough to
round-trip float64 and keep reruns byte-identical.  The writer re-validates
every record before flushing.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import __version__ as _version
from .thermo import CSV_COLUMNS, RECORD_FIELDS, ThermoRecord, validate_record

MAP_COLUMNS = ("gamma", "temperature", "frac_Denv", "frac_Ise", "frac_Ienv", "r", "g", "b", "status")
NEGATIVITY_COLUMNS = ("parameter", "value", "t", "E_N", "I_SE")
COMPARE_COLUMNS = ("gamma", "t", "dS_Spohn", "dS_DL", "dS_ELB", "delta", "epsilon")

SPEC_CONSTANTS = {
    "hbar": 1.0,
    "k_B": 1.0,
    "vacuum_symplectic_eigenvalue": 0.5,
    "entropy_units": "nats",
}


def format_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def write_timeseries_csv(path: Path, records: Sequence[ThermoRecord]) -> None:
    for rec in records:
        validate_record(rec)
    lines = [",".join(CSV_COLUMNS)]
    for rec in records:
        lines.append(",".join(format_float(getattr(rec, c)) for c in CSV_COLUMNS))
    Path(path).write_text("\n".join(lines) + "\n")


def write_timeseries_json(path: Path, records: Sequence[ThermoRecord]) -> None:
    for rec in records:
        validate_record(rec)
    payload = {
        "columns": list(RECORD_FIELDS),
        "records": [
            {k: (None if math.isnan(v) else v) for k, v in asdict(rec).items()} for rec in records
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")


def write_map_csv(path: Path, cells: Iterable[Any]) -> None:
    lines = [",".join(MAP_COLUMNS)]
    for cell in cells:
        lines.append(
            ",".join(
                [
                    format_float(cell.gamma),
                    format_float(cell.temperature),
                    format_float(cell.frac_denv),
                    format_float(cell.frac_ise),
                    format_float(cell.frac_ienv),
                    str(cell.rgb[0]),
                    str(cell.rgb[1]),
                    str(cell.rgb[2]),
                    cell.status,
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_negativity_csv(path: Path, rows: Iterable[tuple[str, float, float, float, float]]) -> None:
    lines = [",".join(NEGATIVITY_COLUMNS)]
    for parameter, value, t, e_n, i_se in rows:
        lines.append(
            ",".join([parameter] + [format_float(v) for v in (value, t, e_n, i_se)])
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_compare_csv(path: Path, rows: Iterable[tuple[float, ...]]) -> None:
    lines = [",".join(COMPARE_COLUMNS)]
    for row in rows:
        lines.append(",".join(format_float(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def manifest_path(out: Path) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".manifest.json")


def write_manifest(out: Path, config: dict[str, Any], extra: dict[str, Any], wall_time: float) -> Path:
    """Manifest JSON alongside an output file: resolved config, constants,
    tool version, wall time."""
    payload = {
        "tool": {"name": "qbmsim", "version": _version},
        "config": config,
        "constants": SPEC_CONSTANTS,
        "wall_time_s": wall_time,
    }
    payload.update(extra)
    path = manifest_path(out)
    path.write_text(json.dumps(payload, indent=1, default=_jsonify) + "\n")
    return path


def _jsonify(obj: Any) -> Any:
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, frozenset):
        return sorted(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")
