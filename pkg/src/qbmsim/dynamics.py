"""Normal-mode diagonalization and the exact symplectic propagator.

The position-block matrix is diagonalized once; propagation to any time t
is then closed form, A(t) = Z diag(sin(z t)/z) Z^T together with its first
and second time derivatives, assembled into the block map
M(t) = [[Adot, A], [Addot, Adot]].  The driving force enters only through
displacement vectors (I(t), Idot(t)) built from per-normal-mode convolution
integrals, which are elementary because the pulse is a three-term
trigonometric polynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import StabilityError
from .gaussian import GaussianState, symplectic_form
from .model import DrivePulse, ModelSpec


def recurrence_time(spec: ModelSpec) -> float:
    """Poincare recurrence time of the finite bath, 2 pi N / omega_max."""
    return 2.0 * math.pi * spec.n_modes / spec.omega_max


@dataclass(frozen=True)
class NormalModeBasis:
    """Normal frequencies z_nu and the orthogonal eigenvector matrix Z of
    the position-block matrix, sorted ascending in z."""

    z: NDArray[np.float64]
    zmat: NDArray[np.float64]


def diagonalize(hx: NDArray[np.float64]) -> NormalModeBasis:
    """Eigendecomposition hx = Z diag(z^2) Z^T with a deterministic sign
    convention (largest-magnitude component of each column made positive).

    Raises StabilityError if any eigenvalue is nonpositive, which signals
    an unphysical discretization (cannot happen with the counter term).
    """
    hx = np.asarray(hx, dtype=float)
    if np.abs(hx - hx.T).max() != 0.0:
        hx = 0.5 * (hx + hx.T)
    w, zmat = np.linalg.eigh(hx)
    if w[0] <= 0:
        raise StabilityError(
            f"position-block matrix has nonpositive eigenvalue {w[0]:.6g}; unstable spectrum"
        )
    pivot = np.abs(zmat).argmax(axis=0)
    signs = np.sign(zmat[pivot, np.arange(zmat.shape[1])])
    signs[signs == 0] = 1.0
    return NormalModeBasis(z=np.sqrt(w), zmat=zmat * signs)


@dataclass(frozen=True)
class Propagator:
    """Closed-form evolution data at one time: the blocks of the symplectic
    map and the drive displacement of the first moments."""

    t: float
    a: NDArray[np.float64]
    adot: NDArray[np.float64]
    addot: NDArray[np.float64]
    disp_x: NDArray[np.float64]
    disp_p: NDArray[np.float64]

    @property
    def m(self) -> NDArray[np.float64]:
        """Block map [[Adot, A], [Addot, Adot]] acting on (x..., p...)."""
        return np.block([[self.adot, self.a], [self.addot, self.adot]])


def _sinc(x: NDArray[np.float64]) -> NDArray[np.float64]:
    """sin(x)/x with the x = 0 limit."""
    return np.sinc(x / np.pi)


def _pulse_components(pulse: DrivePulse) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """F(t) = sum_k c_k sin(a_k t + phi): the sin^2 envelope expands the
    pulse into three sinusoids."""
    coeff = np.array([pulse.f0 / 2.0, -pulse.f0 / 4.0, -pulse.f0 / 4.0])
    freq = np.array(
        [pulse.omega_f, pulse.omega_f + 2.0 * pulse.omega_env, pulse.omega_f - 2.0 * pulse.omega_env]
    )
    return coeff, freq


def _drive_quadratures(
    z: NDArray[np.float64], pulse: DrivePulse, tau: float
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Exact integrals C_nu = int_0^tau cos(z s) F(s) ds and
    S_nu = int_0^tau sin(z s) F(s) ds for every normal frequency.

    Per sinusoid component, int_0^tau sin(w s + phi) ds and the cosine
    analogue reduce to tau * trig(phi + w tau / 2) * sinc(w tau / 2), which
    is stable through the resonant points w -> 0.
    """
    coeff, freq = _pulse_components(pulse)
    phi = pulse.phi
    wp = freq[:, None] + z[None, :]  # (3, n)
    wm = freq[:, None] - z[None, :]
    up = 0.5 * wp * tau
    um = 0.5 * wm * tau
    cos_int = 0.5 * tau * (np.sin(phi + up) * _sinc(up) + np.sin(phi + um) * _sinc(um))
    sin_int = 0.5 * tau * (np.cos(phi + um) * _sinc(um) - np.cos(phi + up) * _sinc(up))
    return coeff @ cos_int, coeff @ sin_int


def propagator_at(basis: NormalModeBasis, pulse: DrivePulse, t: float) -> Propagator:
    """Assemble the propagator blocks and drive displacements at time t.

    A uses sin(z t)/z, Adot cos(z t), Addot -z sin(z t) on the normal
    frequencies; the displacement is I_mu = sum_nu Z_{mu nu} Z_{0 nu}
    int_0^t sin(z_nu (t - s))/z_nu F(s) ds and its time derivative.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    z, zmat = basis.z, basis.zmat
    sin_t = np.sin(z * t)
    cos_t = np.cos(z * t)
    a = (zmat * (sin_t / z)) @ zmat.T
    adot = (zmat * cos_t) @ zmat.T
    addot = (zmat * (-z * sin_t)) @ zmat.T

    dim = z.size
    if pulse.is_active and t > 0.0:
        cos_q, sin_q = _drive_quadratures(z, pulse, min(t, pulse.t_f))
        normal_disp = (sin_t * cos_q - cos_t * sin_q) / z
        normal_vel = cos_t * cos_q + sin_t * sin_q
        weights = zmat[0, :]
        disp_x = zmat @ (weights * normal_disp)
        disp_p = zmat @ (weights * normal_vel)
    else:
        disp_x = np.zeros(dim)
        disp_p = np.zeros(dim)
    return Propagator(t=t, a=a, adot=adot, addot=addot, disp_x=disp_x, disp_p=disp_p)


def evolve(state0: GaussianState, prop: Propagator) -> GaussianState:
    """Exact Gaussian state at the propagator's time, starting from the
    t = 0 state: means -> M means + displacement, cov -> M cov M^T.

    The covariance path never touches the drive, so driven and undriven
    runs produce bit-identical covariance matrices.
    """
    m = prop.m
    means = m @ state0.means + np.concatenate([prop.disp_x, prop.disp_p])
    cov = m @ state0.cov @ m.T
    cov = 0.5 * (cov + cov.T)
    return GaussianState(means=means, cov=cov)


def symplecticity_defect(prop: Propagator) -> float:
    """Frobenius norm of M Omega M^T - Omega; zero for an exact symplectic map."""
    n = prop.a.shape[0]
    omega = symplectic_form(n)
    m = prop.m
    return float(np.linalg.norm(m @ omega @ m.T - omega))
