"""Information-theoretic toolkit for Gaussian continuous-variable states.

Quadrature ordering is (x_0..x_N, p_0..p_N) throughout, with symplectic
form Omega = [[0, 1], [-1, 0]] in that block convention and the vacuum
normalized to symplectic eigenvalue 1/2.  Entropies are in nats.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .errors import StabilityError

# Symplectic eigenvalues this far below 1/2 are treated as invalid states;
# anything in between is roundoff and gets clamped to the vacuum value.
NU_TOLERANCE = 1e-8

# Reference states with min symplectic eigenvalue below 1/2 + this bound
# make the relative entropy diverge.
PURITY_GUARD = 1e-9

# Partial-transpose eigenvalues must undercut the vacuum by more than
# roundoff to count as entanglement.
PPT_ROUNDOFF_GUARD = 1e-13


def symplectic_form(n_modes: int) -> NDArray[np.float64]:
    """Omega = [[0, I], [-I, 0]] for the (x..., p...) ordering."""
    eye = np.eye(n_modes)
    zero = np.zeros((n_modes, n_modes))
    return np.block([[zero, eye], [-eye, zero]])


@dataclass(frozen=True)
class GaussianState:
    """First moments and covariance matrix of an n-mode Gaussian state."""

    means: NDArray[np.float64]
    cov: NDArray[np.float64]

    def __post_init__(self) -> None:
        means = np.asarray(self.means, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if means.ndim != 1 or cov.shape != (means.size, means.size) or means.size % 2:
            raise ValueError(
                f"inconsistent Gaussian state shapes: means {means.shape}, cov {cov.shape}"
            )
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.means.size // 2


def _check_selection(modes: Sequence[int], n_modes: int) -> NDArray[np.intp]:
    sel = np.asarray(list(modes), dtype=np.intp)
    if sel.size == 0:
        raise ValueError("mode selection is empty")
    if len(set(sel.tolist())) != sel.size:
        raise ValueError(f"mode selection contains duplicates: {sel.tolist()}")
    if sel.min() < 0 or sel.max() >= n_modes:
        raise ValueError(f"mode selection {sel.tolist()} out of range for {n_modes} modes")
    return sel


def marginal(state: GaussianState, modes: Sequence[int]) -> GaussianState:
    """Reduced state of the selected modes (Gaussian partial trace): pick the
    corresponding rows/columns, preserving the (x..., p...) ordering."""
    n = state.n_modes
    sel = _check_selection(modes, n)
    idx = np.concatenate([sel, sel + n])
    return GaussianState(means=state.means[idx], cov=state.cov[np.ix_(idx, idx)])


def product_state(*states: GaussianState) -> GaussianState:
    """Tensor product of Gaussian states, keeping the (x..., p...) layout."""
    n_total = sum(s.n_modes for s in states)
    means = np.zeros(2 * n_total)
    cov = np.zeros((2 * n_total, 2 * n_total))
    offset = 0
    for s in states:
        n = s.n_modes
        idx = np.concatenate([offset + np.arange(n), n_total + offset + np.arange(n)])
        means[idx] = s.means
        cov[np.ix_(idx, idx)] = s.cov
        offset += n
    return GaussianState(means=means, cov=cov)


def _validate_cov(cov: NDArray[np.float64]) -> NDArray[np.float64]:
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
        raise ValueError(f"covariance must be square of even dimension, got {cov.shape}")
    if not np.all(np.isfinite(cov)):
        raise ValueError("covariance contains non-finite entries")
    scale = max(1.0, float(np.abs(cov).max()))
    if np.abs(cov - cov.T).max() > 1e-8 * scale:
        raise ValueError("covariance is not symmetric")
    return cov


def symplectic_spectrum(cov: NDArray[np.float64] | GaussianState) -> NDArray[np.float64]:
    """Symplectic eigenvalues of a covariance matrix, sorted ascending.

    These are the positive eigenvalues of i Omega sigma.  Computed from the
    symmetric form: with sigma = L L^T (Cholesky), the singular values of
    L^T Omega L come in pairs (nu_i, nu_i), which is well conditioned also
    for near-pure states.  Falls back to eigenvalues of Omega sigma when the
    matrix is numerically semidefinite.
    """
    if isinstance(cov, GaussianState):
        cov = cov.cov
    cov = _validate_cov(cov)
    n = cov.shape[0] // 2
    if n == 1:
        det = cov[0, 0] * cov[1, 1] - cov[0, 1] * cov[1, 0]
        if det <= 0:
            raise StabilityError(f"one-mode covariance has nonpositive determinant {det}")
        return np.array([np.sqrt(det)])
    try:
        chol = np.linalg.cholesky(cov)
        omega_l = np.vstack([chol[n:], -chol[:n]])  # Omega @ L without the matmul
        sv = np.linalg.svd(chol.T @ omega_l, compute_uv=False)
    except np.linalg.LinAlgError:
        omega = symplectic_form(n)
        ev = np.linalg.eigvals(omega @ cov)
        sv = np.sort(np.abs(ev.imag))[::-1]
    return np.sort(sv[::2])


def entropy_terms(nu: NDArray[np.float64]) -> NDArray[np.float64]:
    """Elementwise entropy contribution of symplectic eigenvalues,
    (nu+1/2) ln(nu+1/2) - (nu-1/2) ln(nu-1/2), vectorized."""
    nu = np.asarray(nu, dtype=float)
    if np.any(nu < 0.5 - NU_TOLERANCE):
        raise StabilityError(
            f"symplectic eigenvalue {nu.min()} below the vacuum value 1/2: invalid state"
        )
    nu = np.maximum(nu, 0.5)
    plus = nu + 0.5
    minus = nu - 0.5
    # (nu - 1/2) ln(nu - 1/2) -> 0 at the vacuum
    return plus * np.log(plus) - np.where(minus > 0.0, minus * np.log(np.where(minus > 0.0, minus, 1.0)), 0.0)


def von_neumann_entropy(state: GaussianState | NDArray[np.float64]) -> float:
    """Entropy (nats) from a state or a precomputed symplectic spectrum:
    sum over modes of (nu+1/2) ln(nu+1/2) - (nu-1/2) ln(nu-1/2)."""
    if isinstance(state, GaussianState):
        nu = symplectic_spectrum(state.cov)
    else:
        nu = np.asarray(state, dtype=float)
    return float(np.sum(entropy_terms(nu)))


def williamson(cov: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Williamson normal form: cov = S @ diag(nu, nu) @ S.T with S symplectic.

    Returns (nu, S) where nu has one entry per mode (unsorted, as delivered
    by the Schur form).  Uses the real Schur form of
    cov^{-1/2} Omega cov^{-1/2}, whose antisymmetric 2x2 blocks carry 1/nu.
    """
    cov = _validate_cov(cov)
    dim = cov.shape[0]
    n = dim // 2
    w, q = np.linalg.eigh(cov)
    if w.min() <= 0:
        raise StabilityError("covariance is not positive definite")
    inv_root = (q / np.sqrt(w)) @ q.T

    # interleave to (x1, p1, x2, p2, ...) where the Schur blocks live
    perm = np.empty(dim, dtype=np.intp)
    perm[0::2] = np.arange(n)
    perm[1::2] = np.arange(n) + n

    omega_int = np.zeros((dim, dim))
    for j in range(n):
        omega_int[2 * j, 2 * j + 1] = 1.0
        omega_int[2 * j + 1, 2 * j] = -1.0

    a_int = inv_root[np.ix_(perm, perm)]
    skew = a_int @ omega_int @ a_int
    skew = 0.5 * (skew - skew.T)
    t_mat, o_mat = scipy.linalg.schur(skew, output="real")

    nu = np.empty(n)
    for j in range(n):
        theta = t_mat[2 * j, 2 * j + 1]
        if theta < 0:  # swap the block's columns so the upper element is +1/nu
            o_mat[:, [2 * j, 2 * j + 1]] = o_mat[:, [2 * j + 1, 2 * j]]
            theta = -theta
        if theta == 0:
            raise StabilityError("singular Williamson block; covariance is degenerate")
        nu[j] = 1.0 / theta

    d_half = np.repeat(1.0 / np.sqrt(nu), 2)
    root = (q * np.sqrt(w)) @ q.T
    s_int = root[np.ix_(perm, perm)] @ o_mat * d_half  # cov^{1/2} O D^{-1/2}

    inv_perm = np.argsort(perm)
    s_mat = s_int[np.ix_(inv_perm, inv_perm)]
    return nu, s_mat


def gibbs_matrix(cov: NDArray[np.float64]) -> NDArray[np.float64]:
    """Quadratic-form matrix G of the Gibbs-exponential representation
    rho ~ exp(-1/2 (R - m)^T G (R - m)), i.e. G = 2i Omega arccoth(2i sigma Omega).

    Evaluated spectrally in the Williamson basis, where the scalar map is
    nu -> 2 arccoth(2 nu) per mode.  Raises for (near-)pure covariances,
    for which G diverges.
    """
    nu, s_mat = williamson(cov)
    if np.min(nu) <= 0.5 + PURITY_GUARD:
        raise StabilityError(
            f"reference state has symplectic eigenvalue {nu.min():.12g} at or near the "
            "vacuum value 1/2: Gibbs matrix (and relative entropy) diverges"
        )
    g = 2.0 * np.arctanh(1.0 / (2.0 * nu))  # arccoth(y) = arctanh(1/y)
    n = nu.size
    s_inv = -symplectic_form(n) @ s_mat.T @ symplectic_form(n)
    return s_inv.T @ np.diag(np.concatenate([g, g])) @ s_inv


def relative_entropy(rho1: GaussianState, rho2: GaussianState) -> float:
    """Quantum relative entropy S(rho1 || rho2) between Gaussian states:

        S(rho2) - S(rho1) + 1/2 Tr[G2 (sigma1 - sigma2)] + 1/2 d^T G2 d

    with d the difference of means and G2 the Gibbs matrix of rho2
    (which must be full rank, i.e. all nu > 1/2).
    """
    if rho1.n_modes != rho2.n_modes:
        raise ValueError(f"mode-count mismatch: {rho1.n_modes} vs {rho2.n_modes}")
    nu2, _ = williamson(rho2.cov)
    g2 = gibbs_matrix(rho2.cov)
    s1 = von_neumann_entropy(symplectic_spectrum(rho1.cov))
    s2 = von_neumann_entropy(nu2)
    d = rho1.means - rho2.means
    quad = 0.5 * float(np.trace(g2 @ (rho1.cov - rho2.cov))) + 0.5 * float(d @ g2 @ d)
    return s2 - s1 + quad


def mutual_information(state: GaussianState, modes: Sequence[int]) -> float:
    """I(A:B) = S(A) + S(B) - S(AB) across the bipartition selected modes
    vs complement."""
    n = state.n_modes
    sel = _check_selection(modes, n)
    rest = np.setdiff1d(np.arange(n), sel)
    if rest.size == 0:
        raise ValueError("bipartition needs a nonempty complement")
    s_a = von_neumann_entropy(marginal(state, sel))
    s_b = von_neumann_entropy(marginal(state, rest))
    s_ab = von_neumann_entropy(state)
    return s_a + s_b - s_ab


def partial_transpose(state: GaussianState, modes: Sequence[int]) -> GaussianState:
    """Covariance-level partial transposition: flip the sign of the selected
    modes' momenta.  The result may violate the state condition; that is the
    entanglement signal."""
    n = state.n_modes
    sel = _check_selection(modes, n)
    signs = np.ones(2 * n)
    signs[sel + n] = -1.0
    return GaussianState(means=state.means * signs, cov=state.cov * np.outer(signs, signs))


def logarithmic_negativity(state: GaussianState, system_mode: int = 0) -> float:
    """E_N = sum_i max(0, -ln 2 nu~_i) over the symplectic spectrum of the
    partially transposed covariance, for the 1-vs-rest bipartition where the
    PPT criterion is necessary and sufficient."""
    nu = symplectic_spectrum(partial_transpose(state, [system_mode]).cov)
    below = nu[nu < 0.5 * (1.0 - PPT_ROUNDOFF_GUARD)]
    if below.size == 0:
        return 0.0
    return float(np.sum(-np.log(2.0 * below)))
