"""Figure builders over the simulator's documented CSV schemas.

The renderer never recomputes physics: it validates the input columns,
maps them straight onto matplotlib artists, and writes a deterministic
image.  Contribution colormaps color each (gamma, T) cell by its fraction
triple directly: red = bath-mode displacement D_env, green = system-bath
mutual information I_SE, blue = intra-bath mutual information I_env.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

TIMESERIES_COLUMNS = (
    "t", "S_S", "S_E", "S_SE", "dS_Spohn", "dS_DL", "dS_ELB",
    "I_SE", "I_env", "D_env", "delta", "epsilon", "E_N", "U_S", "U_E",
)
MAP_COLUMNS = ("gamma", "temperature", "frac_Denv", "frac_Ise", "frac_Ienv", "r", "g", "b", "status")
NEGATIVITY_COLUMNS = ("parameter", "value", "t", "E_N", "I_SE")

KINDS = ("timeseries", "colormap", "legend-triangle")

DEFAULT_TIMESERIES_COLUMNS = ("dS_DL", "dS_ELB")

MISSING_CELL_COLOR = (0.85, 0.85, 0.85)


class SchemaError(ValueError):
    """Input file does not match the documented CSV schema."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    out: Path
    source: Path | None = None
    columns: tuple[str, ...] = DEFAULT_TIMESERIES_COLUMNS
    xlabel: str | None = None
    ylabel: str | None = None
    title: str | None = None
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None
    dpi: int = 150

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if self.kind != "legend-triangle" and self.source is None:
            raise SchemaError(f"figure kind {self.kind!r} requires an input file")


def _read_csv(path: Path, expected: tuple[str, ...]) -> dict[str, list[str]]:
    try:
        with open(path, newline="") as handle:
            reader = csv.reader(handle)
            rows = list(reader)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise SchemaError(f"{path} is empty")
    header = tuple(rows[0])
    if header != expected:
        raise SchemaError(
            f"{path} header mismatch: expected {list(expected)}, found {list(header)}"
        )
    if len(rows) < 2:
        raise SchemaError(f"{path} has a header but no data rows")
    columns: dict[str, list[str]] = {name: [] for name in expected}
    for row in rows[1:]:
        if len(row) != len(expected):
            raise SchemaError(f"{path}: row with {len(row)} fields, expected {len(expected)}")
        for name, value in zip(expected, row):
            columns[name].append(value)
    return columns


def _floats(values: list[str]) -> np.ndarray:
    return np.array([float(v) for v in values])


def _render_timeseries(spec: FigureSpec) -> None:
    data = _read_csv(spec.source, TIMESERIES_COLUMNS)
    t = _floats(data["t"])
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for name in spec.columns:
        if name not in TIMESERIES_COLUMNS:
            raise SchemaError(f"unknown time-series column {name!r}")
        ax.plot(t, _floats(data[name]), label=name, linewidth=1.2)
    ax.set_xlabel(spec.xlabel or r"$t\,\omega_0$")
    ax.set_ylabel(spec.ylabel or "entropy production")
    if spec.title:
        ax.set_title(spec.title)
    if spec.xlim:
        ax.set_xlim(*spec.xlim)
    if spec.ylim:
        ax.set_ylim(*spec.ylim)
    ax.legend(frameon=False)
    _save(fig, spec)


def _cell_edges(values: np.ndarray) -> np.ndarray:
    """Edges positioned midway between cell centers (supports nonuniform grids)."""
    if values.size == 1:
        half = 0.5 * (abs(values[0]) if values[0] != 0 else 0.5)
        return np.array([values[0] - half, values[0] + half])
    mids = 0.5 * (values[1:] + values[:-1])
    first = values[0] - (mids[0] - values[0])
    last = values[-1] + (values[-1] - mids[-1])
    return np.concatenate([[first], mids, [last]])


def _render_colormap(spec: FigureSpec) -> None:
    data = _read_csv(spec.source, MAP_COLUMNS)
    gammas = np.unique(_floats(data["gamma"]))
    temps = np.unique(_floats(data["temperature"]))
    image = np.tile(np.array(MISSING_CELL_COLOR), (temps.size, gammas.size, 1))
    g_idx = {g: i for i, g in enumerate(gammas)}
    t_idx = {t: i for i, t in enumerate(temps)}
    for k in range(len(data["gamma"])):
        if data["status"][k] != "ok":
            continue
        i = t_idx[float(data["temperature"][k])]
        j = g_idx[float(data["gamma"][k])]
        triple = (
            float(data["frac_Denv"][k]),
            float(data["frac_Ise"][k]),
            float(data["frac_Ienv"][k]),
        )
        image[i, j] = [min(max(v, 0.0), 1.0) for v in triple]

    fig, ax = plt.subplots(figsize=(6.0, 4.6))
    ax.pcolormesh(
        _cell_edges(gammas), _cell_edges(temps), image, shading="flat", rasterized=True
    )
    ax.set_xlabel(spec.xlabel or r"$\gamma/\omega_0$")
    ax.set_ylabel(spec.ylabel or r"$k_B T/\omega_0$")
    if spec.title:
        ax.set_title(spec.title)
    if spec.xlim:
        ax.set_xlim(*spec.xlim)
    if spec.ylim:
        ax.set_ylim(*spec.ylim)
    _save(fig, spec)


def _render_legend_triangle(spec: FigureSpec, samples: int = 301) -> None:
    """The reachable colors: fractions are nonnegative and sum to one, a
    triangular planar cut of the RGB cube with pure contributions at the
    corners."""
    corner_d = np.array([0.0, 0.0])
    corner_i = np.array([1.0, 0.0])
    corner_e = np.array([0.5, math.sqrt(3.0) / 2.0])
    xs = np.linspace(0.0, 1.0, samples)
    ys = np.linspace(0.0, math.sqrt(3.0) / 2.0, samples)
    grid_x, grid_y = np.meshgrid(xs, ys)

    # barycentric coordinates w.r.t. the three corners
    def bary(px, py, a, b, c):
        det = (b[1] - c[1]) * (a[0] - c[0]) + (c[0] - b[0]) * (a[1] - c[1])
        l1 = ((b[1] - c[1]) * (px - c[0]) + (c[0] - b[0]) * (py - c[1])) / det
        l2 = ((c[1] - a[1]) * (px - c[0]) + (a[0] - c[0]) * (py - c[1])) / det
        return l1, l2, 1.0 - l1 - l2

    f_d, f_i, f_e = bary(grid_x, grid_y, corner_d, corner_i, corner_e)
    inside = (f_d >= 0) & (f_i >= 0) & (f_e >= 0)
    image = np.ones(grid_x.shape + (4,))
    image[..., 0] = np.clip(f_d, 0, 1)
    image[..., 1] = np.clip(f_i, 0, 1)
    image[..., 2] = np.clip(f_e, 0, 1)
    image[..., 3] = np.where(inside, 1.0, 0.0)

    fig, ax = plt.subplots(figsize=(4.6, 4.2))
    ax.imshow(image, origin="lower", extent=[0, 1, 0, math.sqrt(3.0) / 2.0])
    ax.text(-0.02, -0.04, r"$D_{\mathrm{env}}$", ha="right", color="darkred")
    ax.text(1.02, -0.04, r"$I_{SE}$", ha="left", color="darkgreen")
    ax.text(0.5, math.sqrt(3.0) / 2.0 + 0.03, r"$I_{\mathrm{env}}$", ha="center", color="darkblue")
    ax.set_axis_off()
    if spec.title:
        ax.set_title(spec.title)
    _save(fig, spec)


def _save(fig, spec: FigureSpec) -> None:
    fig.savefig(
        spec.out,
        dpi=spec.dpi,
        bbox_inches="tight",
        metadata={"Software": None},  # keep reruns byte-identical
    )
    plt.close(fig)


def render(spec: FigureSpec) -> Path:
    """Render one figure; returns the output path."""
    if spec.kind == "timeseries":
        _render_timeseries(spec)
    elif spec.kind == "colormap":
        _render_colormap(spec)
    else:
        _render_legend_triangle(spec)
    return spec.out
