"""Run orchestration: time series, definition comparisons, contribution
maps over (gamma, T), and negativity studies, with persistence.

Sweep cells are independent work units processed by a bounded thread pool;
cells of one coupling column share the diagonalized basis.  Results are
assembled by index, so outputs are identical for any thread count.  A
failing cell is recorded with an error status instead of aborting the
sweep.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .config import CompareConfig, NegativityStudyConfig, RunConfig, SweepConfig
from .dynamics import diagonalize, recurrence_time
from .errors import StabilityError
from .io import (
    write_compare_csv,
    write_manifest,
    write_map_csv,
    write_negativity_csv,
    write_timeseries_csv,
    write_timeseries_json,
)
from .model import ModelSpec, build_couplings, hamiltonian_position_block
from .pipeline import simulate_trajectory, time_grid
from .thermo import (
    SystemHamiltonianSpec,
    ThermoRecord,
    build_records,
    decomposition,
    definition_gap,
    entropy_production_dl,
    entropy_production_elb,
    entropy_production_spohn,
    mutual_information_system_env,
)
from .trajectory import Trajectory

# Entropy production below this is treated as "no production" when forming
# contribution fractions (0/0 cells, e.g. gamma = 0).
PRODUCTION_FLOOR = 1e-12

FRACTION_SUM_TOLERANCE = 1e-6


def _resolved_config(cfg: RunConfig) -> dict:
    data = asdict(cfg)
    data["recurrence_time"] = recurrence_time(cfg.spec)
    return data


def run_timeseries(cfg: RunConfig) -> tuple[list[ThermoRecord], Trajectory]:
    """Simulate one configuration over its time grid, build all records,
    and persist them (CSV or JSON plus manifest) when an output is set."""
    start = time.perf_counter()
    times = time_grid(cfg.spec, cfg.t_end, cfg.n_points)
    traj = simulate_trajectory(
        cfg.spec,
        times,
        compute_bath_entropy="decomposition" in cfg.observables,
        compute_negativity="negativity" in cfg.observables,
        threads=cfg.threads,
    )
    records = build_records(traj, gibbs_frequency=cfg.gibbs_frequency)
    if cfg.out is not None:
        if cfg.fmt == "csv":
            write_timeseries_csv(cfg.out, records)
        else:
            write_timeseries_json(cfg.out, records)
        write_manifest(
            cfg.out,
            _resolved_config(cfg),
            {"kind": "timeseries", "n_records": len(records)},
            time.perf_counter() - start,
        )
    return records, traj


def run_compare_definitions(cfg: CompareConfig) -> dict[float, dict[str, np.ndarray]]:
    """Run the coupling ladder and collect the entropy-production series per
    gamma; persists a long-format CSV plus a summary of max |epsilon|."""
    start = time.perf_counter()
    results: dict[float, dict[str, np.ndarray]] = {}
    rows: list[tuple[float, ...]] = []
    for gamma in cfg.gammas:
        spec = _with(cfg.base, gamma=gamma)
        times = time_grid(spec, cfg.t_end, cfg.n_points)
        traj = simulate_trajectory(spec, times, threads=cfg.threads)
        hspec = SystemHamiltonianSpec.for_model(spec)
        beta = spec.beta
        elb = entropy_production_elb(traj, beta)
        dl = entropy_production_dl(traj, hspec, beta)
        if hspec.include_drive:
            spohn = np.full_like(elb, np.nan)
        else:
            spohn = entropy_production_spohn(traj, hspec, beta)
        delta, epsilon = definition_gap(elb, dl)
        results[gamma] = {
            "t": times, "dS_Spohn": spohn, "dS_DL": dl, "dS_ELB": elb,
            "delta": delta, "epsilon": epsilon,
        }
        rows.extend(
            (gamma, times[i], spohn[i], dl[i], elb[i], delta[i], epsilon[i])
            for i in range(times.size)
        )
    if cfg.out is not None:
        write_compare_csv(cfg.out, rows)
        summary = {
            "max_abs_epsilon": {str(g): float(np.nanmax(np.abs(r["epsilon"]))) for g, r in results.items()},
            "max_abs_delta": {str(g): float(np.nanmax(np.abs(r["delta"]))) for g, r in results.items()},
        }
        write_manifest(
            cfg.out,
            {"base": asdict(_with(cfg.base, gamma=cfg.gammas[0])), "gammas": list(cfg.gammas),
             "t_end": cfg.t_end, "n_points": cfg.n_points},
            {"kind": "compare-definitions", "summary": summary},
            time.perf_counter() - start,
        )
    return results


@dataclass(frozen=True)
class ContributionCell:
    """Entropy-production composition at one (gamma, T) grid point: the
    fractions (D_env, I_SE, I_env)/dS_ELB at the evaluation time and the
    derived 8-bit RGB triple."""

    gamma: float
    temperature: float
    frac_denv: float
    frac_ise: float
    frac_ienv: float
    rgb: tuple[int, int, int]
    status: str

    @property
    def dominant(self) -> str:
        fracs = {"D_env": self.frac_denv, "I_SE": self.frac_ise, "I_env": self.frac_ienv}
        return max(fracs, key=lambda k: fracs[k])


def _with(spec: ModelSpec, **kw) -> ModelSpec:
    data = asdict(spec)
    drive = data.pop("drive")
    data.update(kw)
    return ModelSpec(drive=spec.drive, **data)


def _missing_cell(gamma: float, temperature: float, status: str) -> ContributionCell:
    return ContributionCell(
        gamma=gamma, temperature=temperature,
        frac_denv=math.nan, frac_ise=math.nan, frac_ienv=math.nan,
        rgb=(0, 0, 0), status=status,
    )


def evaluate_contribution_cell(
    spec: ModelSpec, eval_time: float, basis=None
) -> ContributionCell:
    """Fractions of the three contributions at the evaluation time for one
    model instance."""
    if spec.temperature == 0.0:
        return _missing_cell(spec.gamma, spec.temperature, "undefined_temperature")
    traj = simulate_trajectory(
        spec, np.array([0.0, eval_time]), compute_bath_entropy=True, basis=basis
    )
    beta = spec.beta
    elb = entropy_production_elb(traj, beta)[-1]
    if abs(elb) < PRODUCTION_FLOOR:
        return _missing_cell(spec.gamma, spec.temperature, "undefined_zero_production")
    ise, ienv, denv = (s[-1] for s in decomposition(traj, beta))
    fracs = np.array([denv, ise, ienv]) / elb
    if abs(fracs.sum() - 1.0) > FRACTION_SUM_TOLERANCE:
        return _missing_cell(
            spec.gamma, spec.temperature, f"error: fraction closure off by {fracs.sum() - 1.0:.2e}"
        )
    rgb = tuple(int(round(255.0 * min(max(f, 0.0), 1.0))) for f in fracs)
    return ContributionCell(
        gamma=spec.gamma, temperature=spec.temperature,
        frac_denv=float(fracs[0]), frac_ise=float(fracs[1]), frac_ienv=float(fracs[2]),
        rgb=rgb, status="ok",
    )


def run_contribution_map(cfg: SweepConfig) -> list[ContributionCell]:
    """Evaluate the full (gamma, T) grid.  The basis is diagonalized once per
    coupling value and shared across that column's temperature cells; cell
    failures degrade to tagged missing cells."""
    start = time.perf_counter()
    eval_time = cfg.eval_time if cfg.eval_time is not None else recurrence_time(cfg.base)
    cells: list[ContributionCell | None] = [None] * (len(cfg.gammas) * len(cfg.temperatures))

    for i, gamma in enumerate(cfg.gammas):
        column_spec = _with(cfg.base, gamma=float(gamma))
        basis = diagonalize(hamiltonian_position_block(column_spec, build_couplings(column_spec)))

        def work(j: int, gamma=gamma, basis=basis) -> None:
            temperature = float(cfg.temperatures[j])
            spec = _with(cfg.base, gamma=float(gamma), temperature=temperature)
            try:
                cell = evaluate_contribution_cell(spec, eval_time, basis=basis)
            except Exception as exc:  # cell failures must not kill the sweep
                cell = _missing_cell(float(gamma), temperature, f"error: {exc}")
            cells[i * len(cfg.temperatures) + j] = cell

        if cfg.threads > 1:
            with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                list(pool.map(work, range(len(cfg.temperatures))))
        else:
            for j in range(len(cfg.temperatures)):
                work(j)

    result = [c for c in cells if c is not None]
    if cfg.out is not None:
        write_map_csv(cfg.out, result)
        write_manifest(
            cfg.out,
            {"base": asdict(cfg.base), "gammas": list(map(float, cfg.gammas)),
             "temperatures": list(map(float, cfg.temperatures)), "eval_time": eval_time},
            {"kind": "contribution-map",
             "ok_cells": sum(1 for c in result if c.status == "ok"),
             "total_cells": len(result)},
            time.perf_counter() - start,
        )
    return result


def run_negativity_study(cfg: NegativityStudyConfig) -> dict[float, dict[str, np.ndarray]]:
    """E_N(t) and I_SE(t) per parameter value, always with the drive off
    (displacements cannot change either quantity)."""
    start = time.perf_counter()
    results: dict[float, dict[str, np.ndarray]] = {}
    rows = []
    from .model import DrivePulse

    for value in cfg.values:
        base = _with(cfg.base, **{cfg.parameter: float(value)})
        spec = ModelSpec(
            n_modes=base.n_modes, omega0=base.omega0, omega_max=base.omega_max,
            gamma=base.gamma, cutoff=base.cutoff, temperature=base.temperature,
            drive=DrivePulse(f0=0.0),
        )
        times = time_grid(spec, cfg.t_end, cfg.n_points)
        traj = simulate_trajectory(
            spec, times, compute_bath_entropy=True, compute_negativity=True, threads=cfg.threads
        )
        i_se = mutual_information_system_env(traj)
        results[value] = {"t": times, "E_N": traj.log_negativity, "I_SE": i_se}
        rows.extend(
            (cfg.parameter, value, times[i], traj.log_negativity[i], i_se[i])
            for i in range(times.size)
        )
    if cfg.out is not None:
        write_negativity_csv(cfg.out, rows)
        write_manifest(
            cfg.out,
            {"base": asdict(cfg.base), "parameter": cfg.parameter,
             "values": list(cfg.values), "t_end": cfg.t_end, "n_points": cfg.n_points},
            {"kind": "negativity-study", "driving_forced_off": True},
            time.perf_counter() - start,
        )
    return results
