"""Entropy production under competing definitions, heats, and the
decomposition of the always-positive form into correlation terms.

Three definitions are computed along a trajectory:

* Spohn: difference of relative entropies against the fixed system Gibbs
  state (time-independent system Hamiltonian only).
* DL: instantaneous Gibbs references plus an integral term, reducing to
  Spohn when the drive is off.
* ELB: the global relative entropy S(rho_SE(t) || rho_S(t) x rho_E^eq),
  evaluated through the exact identity dS_S + beta dU_E that holds for an
  initially uncorrelated state with the bath in equilibrium.

The decomposition splits the ELB form into system-environment mutual
information, intra-environment mutual information, and the summed
relative-entropy displacement of the individual bath modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import cumulative_simpson

from .errors import StabilityError
from .gaussian import GaussianState, entropy_terms
from .model import DrivePulse, ModelSpec, build_couplings, drive_force, drive_force_derivative, thermal_coth_factor
from .trajectory import Trajectory

# Denominator guard for the relative error between definitions.
EPSILON_MASK_THRESHOLD = 1e-12

# Writer-side validation bounds.
ELB_NEGATIVITY_TOLERANCE = 1e-8
CLOSURE_TOLERANCE = 1e-7


@dataclass(frozen=True)
class SystemHamiltonianSpec:
    """Frequency (and optional pulse) entering H_S(t) and its Gibbs state.

    The default charges the counter term to the interaction, i.e. the Gibbs
    references use the renormalized frequency omega0; pass the bare
    frequency for sensitivity studies.
    """

    frequency: float
    pulse: DrivePulse | None = None

    def __post_init__(self) -> None:
        if self.frequency <= 0:
            raise ValueError(f"system frequency must be positive, got {self.frequency}")

    @property
    def include_drive(self) -> bool:
        return self.pulse is not None and self.pulse.is_active

    @classmethod
    def for_model(cls, spec: ModelSpec, which: str = "renormalized") -> "SystemHamiltonianSpec":
        if which == "renormalized":
            freq = spec.omega0
        elif which == "bare":
            freq = build_couplings(spec).omega_b
        else:
            raise ValueError(f"unknown Gibbs frequency choice {which!r}")
        return cls(frequency=freq, pulse=spec.drive if spec.drive.is_active else None)


def gibbs_state_system(hspec: SystemHamiltonianSpec, beta: float, t: float = 0.0) -> GaussianState:
    """Instantaneous Gibbs state of H_S(t) = p^2/2 + w^2 x^2/2 - F(t) x:
    a thermal covariance displaced to <x> = F(t)/w^2 (square completion)."""
    if not (beta > 0) or not math.isfinite(beta):
        raise ValueError(f"finite positive beta required, got {beta}")
    w = hspec.frequency
    c = float(thermal_coth_factor(np.array(w), 1.0 / beta))
    mean_x = drive_force(hspec.pulse, t) / w**2 if hspec.include_drive else 0.0
    return GaussianState(
        means=np.array([mean_x, 0.0]),
        cov=np.array([[c / (2.0 * w), 0.0], [0.0, c * w / 2.0]]),
    )


def _relative_entropy_to_thermal(
    xx: NDArray[np.float64],
    pp: NDArray[np.float64],
    xp: NDArray[np.float64],
    mean_x: NDArray[np.float64],
    mean_p: NDArray[np.float64],
    omega: NDArray[np.float64] | float,
    beta: float,
    ref_mean_x: NDArray[np.float64] | float = 0.0,
) -> NDArray[np.float64]:
    """Vectorized S(rho || thermal(omega, beta)) for one-mode states.

    For a thermal reference the Gibbs matrix is beta * diag(omega^2, 1)
    exactly (the spectral map 2 arccoth(2 nu_ref) evaluates to beta*omega),
    which stays finite at any temperature the caller allows.
    """
    nu_ref = 0.5 * thermal_coth_factor(np.asarray(omega, dtype=float), 1.0 / beta)
    s_ref = entropy_terms(nu_ref)
    nu = np.sqrt(xx * pp - xp**2)
    s_state = entropy_terms(nu)
    ref_xx = nu_ref / omega
    ref_pp = nu_ref * omega
    dx = mean_x - ref_mean_x
    quad = 0.5 * beta * (omega**2 * (xx - ref_xx + dx**2) + (pp - ref_pp + mean_p**2))
    return s_ref - s_state + quad


def entropy_production_spohn(
    traj: Trajectory, hspec: SystemHamiltonianSpec, beta: float
) -> NDArray[np.float64]:
    """S(rho_S(0)||rho_S^eq) - S(rho_S(t)||rho_S^eq) against the fixed Gibbs
    state of the undriven system Hamiltonian."""
    if hspec.include_drive:
        raise ValueError("Spohn entropy production assumes a time-independent H_S; got a driven one")
    if not (beta > 0) or not math.isfinite(beta):
        raise ValueError(f"finite positive beta required, got {beta}")
    rel = _relative_entropy_to_thermal(
        traj.sys_xx, traj.sys_pp, traj.sys_xp,
        traj.mean_x[:, 0], traj.mean_p[:, 0], hspec.frequency, beta,
    )
    return rel[0] - rel


def entropy_production_dl(
    traj: Trajectory, hspec: SystemHamiltonianSpec, beta: float
) -> NDArray[np.float64]:
    """Driven generalization: instantaneous Gibbs references plus the
    integral of beta Fdot(s) (<x(s)> - F(s)/w^2), done by composite Simpson
    on the trajectory grid with the analytic pulse derivative."""
    if not (beta > 0) or not math.isfinite(beta):
        raise ValueError(f"finite positive beta required, got {beta}")
    w = hspec.frequency
    if hspec.include_drive:
        force = np.asarray(drive_force(hspec.pulse, traj.times))
        ref_mean = force / w**2
    else:
        force = np.zeros_like(traj.times)
        ref_mean = 0.0
    rel = _relative_entropy_to_thermal(
        traj.sys_xx, traj.sys_pp, traj.sys_xp,
        traj.mean_x[:, 0], traj.mean_p[:, 0], w, beta, ref_mean_x=ref_mean,
    )
    if hspec.include_drive:
        fdot = np.asarray(drive_force_derivative(hspec.pulse, traj.times))
        integrand = beta * fdot * (traj.mean_x[:, 0] - force / w**2)
        integral = cumulative_simpson(integrand, x=traj.times, initial=0.0)
    else:
        integral = 0.0
    return rel[0] - rel - integral


def bath_energy(traj: Trajectory) -> NDArray[np.float64]:
    """U_E(t) = sum_n (<p_n^2> + omega_n^2 <x_n^2>)/2 from the bath-mode
    second moments and means."""
    w2 = traj.spec.bath_frequencies**2
    return 0.5 * np.sum(
        traj.bath_pp + traj.mean_p[:, 1:] ** 2 + w2 * (traj.bath_xx + traj.mean_x[:, 1:] ** 2),
        axis=1,
    )


def system_energy(traj: Trajectory, hspec: SystemHamiltonianSpec) -> NDArray[np.float64]:
    """U_S(t) = <H_S(t)>, including the -F(t)<x> term when driven."""
    w2 = hspec.frequency**2
    u = 0.5 * (traj.sys_pp + traj.mean_p[:, 0] ** 2 + w2 * (traj.sys_xx + traj.mean_x[:, 0] ** 2))
    if hspec.include_drive:
        u = u - np.asarray(drive_force(hspec.pulse, traj.times)) * traj.mean_x[:, 0]
    return u


def heat_elb(traj: Trajectory) -> NDArray[np.float64]:
    """Heat charged to the bath: -Delta U_E(t)."""
    u = bath_energy(traj)
    return u[0] - u


def heat_standard(traj: Trajectory, hspec: SystemHamiltonianSpec) -> NDArray[np.float64]:
    """System-only heat int_0^t Tr{H_S(s) drho_S/ds} ds, equal to Delta U_S
    plus int Fdot <x> when driven and exactly Delta U_S otherwise."""
    u = system_energy(traj, hspec)
    q = u - u[0]
    if hspec.include_drive:
        fdot = np.asarray(drive_force_derivative(hspec.pulse, traj.times))
        q = q + cumulative_simpson(fdot * traj.mean_x[:, 0], x=traj.times, initial=0.0)
    return q


def system_entropy(traj: Trajectory) -> NDArray[np.float64]:
    return entropy_terms(traj.system_symplectic())


def entropy_production_elb(traj: Trajectory, beta: float) -> NDArray[np.float64]:
    """Always-positive entropy production S(rho_SE(t) || rho_S(t) x rho_E^eq),
    computed through the exact identity dS_S(t) + beta dU_E(t) valid for the
    enforced uncorrelated initial state with the bath in equilibrium."""
    if not (beta > 0) or not math.isfinite(beta):
        raise ValueError(f"finite positive beta required, got {beta}")
    s_sys = system_entropy(traj)
    u_env = bath_energy(traj)
    return (s_sys - s_sys[0]) + beta * (u_env - u_env[0])


def mutual_information_system_env(traj: Trajectory) -> NDArray[np.float64]:
    """I_SE(t) = Delta S_S + Delta S_E (equal to S_S + S_E - S_SE because the
    total entropy is conserved and the initial state is a product)."""
    if traj.entropy_env is None:
        raise ValueError("trajectory lacks bath entropies; rerun with the decomposition observable")
    s_sys = system_entropy(traj)
    return (s_sys - s_sys[0]) + (traj.entropy_env - traj.entropy_env[0])


def intra_env_mutual_information(traj: Trajectory) -> NDArray[np.float64]:
    """I_env(t) = sum_n S_{E_n}(t) - S_E(t)."""
    if traj.entropy_env is None:
        raise ValueError("trajectory lacks bath entropies; rerun with the decomposition observable")
    per_mode = entropy_terms(traj.bath_mode_symplectic()).sum(axis=1)
    return per_mode - traj.entropy_env


def env_mode_displacement(traj: Trajectory, beta: float) -> NDArray[np.float64]:
    """D_env(t) = sum_n S(rho_{E_n}(t) || rho_{E_n}(0)) against each mode's
    initial thermal state.  Undefined at T = 0 (pure reference)."""
    if not (beta > 0) or not math.isfinite(beta):
        raise StabilityError(
            "D_env is undefined at zero temperature: the initial bath modes are pure "
            "and the relative entropy against them diverges"
        )
    omega = traj.spec.bath_frequencies[None, :]
    rel = _relative_entropy_to_thermal(
        traj.bath_xx, traj.bath_pp, traj.bath_xp,
        traj.mean_x[:, 1:], traj.mean_p[:, 1:], omega, beta,
    )
    return rel.sum(axis=1)


def decomposition(
    traj: Trajectory, beta: float
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """The three contributions (I_SE, I_env, D_env) whose sum is the ELB
    entropy production."""
    return (
        mutual_information_system_env(traj),
        intra_env_mutual_information(traj),
        env_mode_displacement(traj, beta),
    )


def definition_gap(
    elb: NDArray[np.float64], dl: NDArray[np.float64]
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """delta = ELB - DL and the relative error epsilon = delta / ELB, with
    epsilon masked to NaN where |ELB| is below the 0/0 guard."""
    elb = np.asarray(elb, dtype=float)
    dl = np.asarray(dl, dtype=float)
    delta = elb - dl
    with np.errstate(divide="ignore", invalid="ignore"):
        epsilon = np.where(np.abs(elb) < EPSILON_MASK_THRESHOLD, np.nan, delta / elb)
    return delta, epsilon


@dataclass(frozen=True)
class ThermoRecord:
    """All entropic/thermodynamic observables at one time point."""

    t: float
    S_S: float
    S_E: float
    S_SE: float
    dS_Spohn: float
    dS_DL: float
    dS_ELB: float
    heat_standard: float
    heat_ELB: float
    I_SE: float
    I_env: float
    D_env: float
    delta: float
    epsilon: float
    E_N: float
    U_S: float
    U_E: float


# Fixed serialization order of the time-series CSV.
CSV_COLUMNS = (
    "t", "S_S", "S_E", "S_SE", "dS_Spohn", "dS_DL", "dS_ELB",
    "I_SE", "I_env", "D_env", "delta", "epsilon", "E_N", "U_S", "U_E",
)

RECORD_FIELDS = tuple(f.name for f in fields(ThermoRecord))


def validate_record(record: ThermoRecord) -> None:
    """Writer-side invariants: ELB nonnegativity and decomposition closure."""
    if math.isfinite(record.dS_ELB) and record.dS_ELB < -ELB_NEGATIVITY_TOLERANCE:
        raise StabilityError(
            f"ELB entropy production {record.dS_ELB:.3e} negative beyond tolerance at t={record.t}"
        )
    parts = (record.I_SE, record.I_env, record.D_env, record.dS_ELB)
    if all(math.isfinite(v) for v in parts):
        residual = record.I_SE + record.I_env + record.D_env - record.dS_ELB
        if abs(residual) > CLOSURE_TOLERANCE:
            raise StabilityError(
                f"decomposition closure violated by {residual:.3e} at t={record.t}"
            )


def build_records(
    traj: Trajectory, gibbs_frequency: str = "renormalized"
) -> list[ThermoRecord]:
    """Assemble the full observable table for a trajectory.

    Definitions that are undefined for the run (Spohn under driving; every
    beta-dependent quantity at T = 0; decomposition terms when the bath
    entropy was not computed) are reported as NaN.
    """
    spec = traj.spec
    n_t = traj.n_times
    nan = np.full(n_t, np.nan)
    beta = spec.beta
    hspec = SystemHamiltonianSpec.for_model(spec, gibbs_frequency)
    hspec_static = SystemHamiltonianSpec(frequency=hspec.frequency, pulse=None)

    s_sys = system_entropy(traj)
    s_env = traj.entropy_env if traj.entropy_env is not None else nan
    u_sys = system_energy(traj, hspec)
    u_env = bath_energy(traj)
    q_std = heat_standard(traj, hspec)
    q_elb = heat_elb(traj)

    finite_temp = math.isfinite(beta)
    if finite_temp:
        elb = entropy_production_elb(traj, beta)
        dl = entropy_production_dl(traj, hspec, beta)
        spohn = entropy_production_spohn(traj, hspec_static, beta) if not hspec.include_drive else nan
        delta, epsilon = definition_gap(elb, dl)
    else:
        elb = dl = spohn = delta = epsilon = nan

    if traj.entropy_env is not None:
        i_se = mutual_information_system_env(traj)
        i_env = intra_env_mutual_information(traj)
        d_env = env_mode_displacement(traj, beta) if finite_temp else nan
    else:
        i_se = i_env = d_env = nan

    e_n = traj.log_negativity if traj.log_negativity is not None else nan

    records = []
    for i in range(n_t):
        records.append(
            ThermoRecord(
                t=float(traj.times[i]),
                S_S=float(s_sys[i]),
                S_E=float(s_env[i]),
                S_SE=float(traj.entropy_total),
                dS_Spohn=float(spohn[i]),
                dS_DL=float(dl[i]),
                dS_ELB=float(elb[i]),
                heat_standard=float(q_std[i]),
                heat_ELB=float(q_elb[i]),
                I_SE=float(i_se[i]),
                I_env=float(i_env[i]),
                D_env=float(d_env[i]),
                delta=float(delta[i]),
                epsilon=float(epsilon[i]),
                E_N=float(e_n[i]),
                U_S=float(u_sys[i]),
                U_E=float(u_env[i]),
            )
        )
    return records
