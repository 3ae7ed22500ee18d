"""Time-grid simulation engine.

Each output time is independent (the solution is closed form from t = 0,
never stepped), so the grid is processed by a bounded thread pool; results
land in preallocated arrays indexed by position, making the output
deterministic regardless of completion order.  The per-time reduced
statistics are computed directly from the propagator blocks; the full
covariance matrix is only materialized when bath entropy or negativity is
requested.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numpy.typing import NDArray

from .dynamics import NormalModeBasis, Propagator, diagonalize, propagator_at, recurrence_time
from .gaussian import PPT_ROUNDOFF_GUARD, entropy_terms, symplectic_spectrum
from .model import ModelSpec, build_couplings, hamiltonian_position_block, initial_state
from .trajectory import Trajectory

OBSERVABLE_NAMES = frozenset({"thermo", "decomposition", "negativity"})

# Fraction of the recurrence time past which outputs are contaminated.
RECURRENCE_WARNING_FRACTION = 0.9


def time_grid(spec: ModelSpec, t_end: float | None = None, n_points: int = 2000) -> NDArray[np.float64]:
    """Uniform output grid on [0, t_end], defaulting to the recurrence time."""
    t_max = recurrence_time(spec)
    if t_end is None:
        t_end = t_max
    if t_end <= 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    if n_points < 2:
        raise ValueError(f"n_points must be at least 2, got {n_points}")
    if t_end > RECURRENCE_WARNING_FRACTION * t_max:
        warnings.warn(
            f"requested t_end={t_end:.4g} exceeds {RECURRENCE_WARNING_FRACTION:.0%} of the "
            f"recurrence time t_max={t_max:.4g}; late results are contaminated by Poincare "
            "recurrences",
            stacklevel=2,
        )
    return np.linspace(0.0, t_end, n_points)


def _bath_entropy_from_cov(cov: NDArray[np.float64], n_modes: int) -> float:
    idx = np.concatenate([np.arange(1, n_modes + 1), np.arange(n_modes + 2, 2 * n_modes + 2)])
    nu = symplectic_spectrum(cov[np.ix_(idx, idx)])
    return float(np.sum(entropy_terms(nu)))


def _negativity_from_cov(cov: NDArray[np.float64], n_modes: int) -> float:
    cov_pt = cov.copy()
    p0 = n_modes + 1
    cov_pt[p0, :] *= -1.0
    cov_pt[:, p0] *= -1.0
    nu = symplectic_spectrum(cov_pt)
    below = nu[nu < 0.5 * (1.0 - PPT_ROUNDOFF_GUARD)]
    return float(np.sum(-np.log(2.0 * below))) if below.size else 0.0


def simulate_trajectory(
    spec: ModelSpec,
    times: NDArray[np.float64],
    *,
    compute_bath_entropy: bool = False,
    compute_negativity: bool = False,
    threads: int = 1,
    basis: NormalModeBasis | None = None,
) -> Trajectory:
    """Evolve the exact Gaussian state over the output grid and collect the
    reduced statistics every observable needs."""
    times = np.asarray(times, dtype=float)
    n = spec.n_modes
    if basis is None:
        basis = diagonalize(hamiltonian_position_block(spec, build_couplings(spec)))
    state0 = initial_state(spec)
    diag_x = np.diag(state0.cov)[: n + 1].copy()
    diag_p = np.diag(state0.cov)[n + 1 :].copy()
    sqrt_diag = np.sqrt(np.concatenate([diag_x, diag_p]))

    entropy_total = float(np.sum(entropy_terms(symplectic_spectrum(state0.cov))))

    n_t = times.size
    mean_x = np.empty((n_t, n + 1))
    mean_p = np.empty((n_t, n + 1))
    bath_xx = np.empty((n_t, n))
    bath_pp = np.empty((n_t, n))
    bath_xp = np.empty((n_t, n))
    sys_xx = np.empty(n_t)
    sys_pp = np.empty(n_t)
    sys_xp = np.empty(n_t)
    s_env = np.empty(n_t) if compute_bath_entropy else None
    e_neg = np.empty(n_t) if compute_negativity else None
    need_full = compute_bath_entropy or compute_negativity

    def work(i: int) -> None:
        prop: Propagator = propagator_at(basis, spec.drive, times[i])
        mean_x[i] = prop.disp_x
        mean_p[i] = prop.disp_p
        # diagonal of M sigma0 M^T per block, using that sigma0 is diagonal
        dxx = (prop.adot**2) @ diag_x + (prop.a**2) @ diag_p
        dpp = (prop.addot**2) @ diag_x + (prop.adot**2) @ diag_p
        dxp = (prop.adot * prop.addot) @ diag_x + (prop.a * prop.adot) @ diag_p
        sys_xx[i], sys_pp[i], sys_xp[i] = dxx[0], dpp[0], dxp[0]
        bath_xx[i] = dxx[1:]
        bath_pp[i] = dpp[1:]
        bath_xp[i] = dxp[1:]
        if need_full:
            half = prop.m * sqrt_diag
            cov = half @ half.T
            cov = 0.5 * (cov + cov.T)
            if s_env is not None:
                s_env[i] = _bath_entropy_from_cov(cov, n)
            if e_neg is not None:
                e_neg[i] = _negativity_from_cov(cov, n)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(n_t)))
    else:
        for i in range(n_t):
            work(i)

    return Trajectory(
        spec=spec,
        times=times,
        mean_x=mean_x,
        mean_p=mean_p,
        sys_xx=sys_xx,
        sys_pp=sys_pp,
        sys_xp=sys_xp,
        bath_xx=bath_xx,
        bath_pp=bath_pp,
        bath_xp=bath_xp,
        entropy_total=entropy_total,
        entropy_env=s_env,
        log_negativity=e_neg,
    )
