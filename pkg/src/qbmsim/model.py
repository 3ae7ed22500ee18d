"""Discretized model of a driven central oscillator bilinearly coupled to a
finite harmonic bath.

Builds the frequency grid, the Ohmic couplings with sharp cutoff, the
counter-term (bare) frequency, the arrowhead position-block Hamiltonian
matrix, the pulsed driving force, and the exact thermal/ground Gaussian
initial state.  Units: hbar = k_B = 1, with the renormalized central
frequency omega0 setting the scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import ConfigError
from .gaussian import GaussianState


def coth(x: NDArray[np.float64] | float) -> NDArray[np.float64] | float:
    """coth(x) for x > 0, safe against overflow (tanh saturates at 1)."""
    return 1.0 / np.tanh(x)


@dataclass(frozen=True)
class DrivePulse:
    """Enveloped sinusoidal force on the central oscillator.

    F(t) = f0 * sin(omega_f * t + phi) * sin^2(omega_env * t) for
    t <= pi/omega_env and 0 afterwards.  f0 = 0 means no driving and
    short-circuits every drive-dependent term to exact zeros.
    """

    f0: float = 0.0
    omega_f: float = 1.2
    omega_env: float = 0.1
    phi: float = 0.0

    def __post_init__(self) -> None:
        if self.omega_env <= 0:
            raise ConfigError(f"envelope frequency must be positive, got {self.omega_env}")

    @property
    def t_f(self) -> float:
        """Pulse duration pi/omega_env."""
        return math.pi / self.omega_env

    @property
    def is_active(self) -> bool:
        return self.f0 != 0.0


def drive_force(pulse: DrivePulse, t: NDArray[np.float64] | float) -> NDArray[np.float64] | float:
    """Driving force F(t); zero for t past the pulse duration or f0 = 0."""
    t = np.asarray(t, dtype=float)
    if not pulse.is_active:
        return np.zeros_like(t) if t.ndim else 0.0
    env = np.sin(pulse.omega_env * t)
    f = pulse.f0 * np.sin(pulse.omega_f * t + pulse.phi) * env * env
    f = np.where(t <= pulse.t_f, f, 0.0)
    return f if t.ndim else float(f)


def drive_force_derivative(
    pulse: DrivePulse, t: NDArray[np.float64] | float
) -> NDArray[np.float64] | float:
    """Analytic dF/dt (product rule); defined as 0 past the pulse end."""
    t = np.asarray(t, dtype=float)
    if not pulse.is_active:
        return np.zeros_like(t) if t.ndim else 0.0
    wf, we, phi = pulse.omega_f, pulse.omega_env, pulse.phi
    env = np.sin(we * t)
    df = pulse.f0 * (
        wf * np.cos(wf * t + phi) * env * env
        + 2.0 * we * np.sin(wf * t + phi) * env * np.cos(we * t)
    )
    df = np.where(t <= pulse.t_f, df, 0.0)
    return df if t.ndim else float(df)


@dataclass(frozen=True)
class ModelSpec:
    """All physical parameters defining one instance of the model.

    The bath frequencies sit on the uniform grid omega_n = n * Delta for
    n = 1..n_modes with Delta = omega_max / n_modes, so the grid includes
    the endpoint omega_max and never contains zero.
    """

    n_modes: int
    omega0: float = 1.0
    omega_max: float = 40.0
    gamma: float = 0.1
    cutoff: float = 40.0
    temperature: float = 10.0
    drive: DrivePulse = field(default_factory=DrivePulse)

    def __post_init__(self) -> None:
        if self.n_modes < 1:
            raise ConfigError(f"n_modes must be >= 1, got {self.n_modes}")
        if self.omega0 <= 0:
            raise ConfigError(f"omega0 must be positive, got {self.omega0}")
        if self.omega_max <= 0:
            raise ConfigError(f"omega_max must be positive, got {self.omega_max}")
        if self.gamma < 0:
            raise ConfigError(f"gamma must be nonnegative, got {self.gamma}")
        if self.cutoff <= 0:
            raise ConfigError(f"cutoff must be positive, got {self.cutoff}")
        if self.temperature < 0:
            raise ConfigError(f"temperature must be nonnegative, got {self.temperature}")

    @property
    def grid_spacing(self) -> float:
        return self.omega_max / self.n_modes

    @property
    def bath_frequencies(self) -> NDArray[np.float64]:
        """omega_n = n * Delta, n = 1..N (strictly positive, uniform)."""
        return self.grid_spacing * np.arange(1, self.n_modes + 1, dtype=float)

    @property
    def beta(self) -> float:
        """Inverse temperature; inf at T = 0."""
        return math.inf if self.temperature == 0.0 else 1.0 / self.temperature


def spectral_density(spec: ModelSpec, omega: NDArray[np.float64]) -> NDArray[np.float64]:
    """Ohmic spectral density with a sharp cutoff, J = (2 gamma / pi) * omega
    for omega <= cutoff (inclusive, so cutoff = omega_max loses nothing)."""
    omega = np.asarray(omega, dtype=float)
    return np.where(omega <= spec.cutoff, (2.0 * spec.gamma / math.pi) * omega, 0.0)


@dataclass(frozen=True)
class CouplingSet:
    """Bilinear couplings kappa_n and the counter-term (bare) frequency."""

    kappa: NDArray[np.float64]
    omega_b: float


def build_couplings(spec: ModelSpec) -> CouplingSet:
    """Couplings kappa_n = sqrt(2 Delta omega_n J(omega_n)) and the bare
    frequency omega_b^2 = omega0^2 + sum_n kappa_n^2 / omega_n^2."""
    omega = spec.bath_frequencies
    kappa = np.sqrt(2.0 * spec.grid_spacing * omega * spectral_density(spec, omega))
    omega_b_sq = spec.omega0**2 + float(np.sum((kappa / omega) ** 2))
    return CouplingSet(kappa=kappa, omega_b=math.sqrt(omega_b_sq))


def hamiltonian_position_block(spec: ModelSpec, couplings: CouplingSet) -> NDArray[np.float64]:
    """Arrowhead matrix of the position quadratic form: omega_b^2 top-left,
    omega_n^2 on the diagonal, -kappa_n on the first row and column."""
    n = spec.n_modes
    hx = np.zeros((n + 1, n + 1))
    hx[0, 0] = couplings.omega_b**2
    idx = np.arange(1, n + 1)
    hx[idx, idx] = spec.bath_frequencies**2
    hx[0, 1:] = -couplings.kappa
    hx[1:, 0] = -couplings.kappa
    return hx


def thermal_coth_factor(omega: NDArray[np.float64], temperature: float) -> NDArray[np.float64]:
    """coth(omega / 2T), with the T = 0 limit taken analytically as 1."""
    omega = np.asarray(omega, dtype=float)
    if temperature == 0.0:
        return np.ones_like(omega)
    with np.errstate(over="ignore"):  # tanh saturates before the ratio matters
        return coth(omega / (2.0 * temperature))


def initial_state(spec: ModelSpec) -> GaussianState:
    """Exact Gaussian initial state: central oscillator in the ground state
    of its physical frequency omega0, bath modes thermal at temperature T.

    All first moments vanish; the covariance is diagonal with
    sigma_xx = coth(omega/2T)/(2 omega) and sigma_pp = omega coth(omega/2T)/2
    per mode (coth factor 1 for the ground-state system block).
    """
    n = spec.n_modes
    freqs = np.concatenate(([spec.omega0], spec.bath_frequencies))
    factors = np.concatenate(([1.0], thermal_coth_factor(spec.bath_frequencies, spec.temperature)))
    cov = np.zeros((2 * (n + 1), 2 * (n + 1)))
    d = np.arange(n + 1)
    cov[d, d] = factors / (2.0 * freqs)
    cov[n + 1 + d, n + 1 + d] = factors * freqs / 2.0
    return GaussianState(means=np.zeros(2 * (n + 1)), cov=cov)
