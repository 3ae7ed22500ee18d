"""Reduced per-time-point data produced by a simulation run.

Full (N+1)-mode covariance matrices are too large to retain along a dense
time grid, so a trajectory stores exactly the marginals the thermodynamic
observables consume: all first moments, the system 2x2 block, the per-mode
bath blocks, and the already-reduced bath entropy / negativity series.
The total-state entropy is a constant of motion and is stored once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .gaussian import GaussianState
from .model import ModelSpec


@dataclass(frozen=True)
class Trajectory:
    spec: ModelSpec
    times: NDArray[np.float64]
    mean_x: NDArray[np.float64]  # (n_t, N+1)
    mean_p: NDArray[np.float64]
    sys_xx: NDArray[np.float64]  # (n_t,)
    sys_pp: NDArray[np.float64]
    sys_xp: NDArray[np.float64]
    bath_xx: NDArray[np.float64]  # (n_t, N)
    bath_pp: NDArray[np.float64]
    bath_xp: NDArray[np.float64]
    entropy_total: float
    entropy_env: NDArray[np.float64] | None = None
    log_negativity: NDArray[np.float64] | None = None

    @property
    def n_times(self) -> int:
        return self.times.size

    def system_state(self, i: int) -> GaussianState:
        """One-mode Gaussian marginal of the central oscillator at times[i]."""
        cov = np.array(
            [[self.sys_xx[i], self.sys_xp[i]], [self.sys_xp[i], self.sys_pp[i]]]
        )
        return GaussianState(means=np.array([self.mean_x[i, 0], self.mean_p[i, 0]]), cov=cov)

    def system_symplectic(self) -> NDArray[np.float64]:
        """nu(t) of the system marginal, sqrt(det sigma_S)."""
        return np.sqrt(self.sys_xx * self.sys_pp - self.sys_xp**2)

    def bath_mode_symplectic(self) -> NDArray[np.float64]:
        """nu_n(t) of each bath-mode marginal, shape (n_t, N)."""
        return np.sqrt(self.bath_xx * self.bath_pp - self.bath_xp**2)
