"""Brute-force two-mode Fock-space engine.

States are amplitude grids ``c[n, m]`` with ``n`` photons in the h mode and
``m`` in the v mode, both truncated at ``n_max``. The Kerr Hamiltonian is
diagonal in this basis, so evolution is a phase per grid cell, and Stokes
moments are obtained by applying the ladder-operator bilinears directly to
the grid. This engine is the reference the closed forms are checked against.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.special import gammaln
from scipy.stats import poisson

from .errors import BoundaryWarning, TruncationError
from .params import KerrParams, StokesMoments

HARD_MAX_CUTOFF = 255


@dataclass(frozen=True)
class FockCutoff:
    """Per-mode photon-number cutoff; basis indices run over 0..n_max."""

    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")

    @property
    def dim(self) -> int:
        return self.n_max + 1


def _as_cutoff(cutoff) -> FockCutoff:
    return cutoff if isinstance(cutoff, FockCutoff) else FockCutoff(int(cutoff))


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Normalized pure state on the truncated two-mode Fock space.

    Stored in polar form, ``magnitudes`` |c[n, m]| and ``phases`` arg c[n, m],
    so that diagonal (phase-only) evolution leaves the photon-number
    distribution bitwise unchanged. Arrays are read-only, which makes states
    safe to share between threads and sweeps.
    """

    magnitudes: np.ndarray
    phases: np.ndarray
    tail_tol: float = 1e-12

    def __post_init__(self):
        mags = np.array(self.magnitudes, dtype=float, copy=True)
        phases = np.array(self.phases, dtype=float, copy=True)
        if mags.ndim != 2 or mags.shape[0] != mags.shape[1] or mags.shape[0] < 2:
            raise ValueError(f"amplitude grid must be square with side >= 2, got {mags.shape}")
        if phases.shape != mags.shape:
            raise ValueError("magnitudes and phases must have the same shape")
        mags.setflags(write=False)
        phases.setflags(write=False)
        object.__setattr__(self, "magnitudes", mags)
        object.__setattr__(self, "phases", phases)

    @classmethod
    def from_amplitudes(cls, amplitudes, tail_tol: float = 1e-12) -> "TwoModeState":
        amps = np.asarray(amplitudes, dtype=np.complex128)
        return cls(np.abs(amps), np.angle(amps), tail_tol=tail_tol)

    @property
    def amplitudes(self) -> np.ndarray:
        return self.magnitudes * np.exp(1j * self.phases)

    @property
    def cutoff(self) -> FockCutoff:
        return FockCutoff(self.magnitudes.shape[0] - 1)

    def probabilities(self) -> np.ndarray:
        return self.magnitudes**2

    def norm(self) -> float:
        return float(np.sum(self.probabilities().ravel()))

    def marginals(self) -> tuple[np.ndarray, np.ndarray]:
        """Photon-number distributions of the h and v modes."""
        p = self.probabilities()
        return p.sum(axis=1), p.sum(axis=0)

    def mean_photon_numbers(self) -> tuple[float, float]:
        p_h, p_v = self.marginals()
        k = np.arange(p_h.size)
        return float(np.sum(k * p_h)), float(np.sum(k * p_v))

    def boundary_mass(self) -> float:
        """Probability in the top two photon-number shells of either mode."""
        p = self.probabilities()
        edge = max(p.shape[0] - 2, 0)
        inner = p[:edge, :edge].ravel()
        return float(max(1.0 - np.sum(inner), 0.0))


def poisson_tail(mean_photons: float, n_max: int) -> float:
    """P(n > n_max) for a Poisson distribution of the given mean."""
    if mean_photons == 0:
        return 0.0
    return float(poisson.sf(n_max, mean_photons))


def auto_cutoff(alphas, tail_tol: float = 1e-12, hard_max: int = HARD_MAX_CUTOFF) -> FockCutoff:
    """Smallest cutoff whose Poisson tail is below ``tail_tol`` for every amplitude.

    Raises TruncationError when the required cutoff exceeds ``hard_max``.
    """
    if np.isscalar(alphas):
        alphas = [alphas]
    n_bar = max(abs(a) ** 2 for a in alphas)
    n_max = max(1, int(math.ceil(n_bar)))
    while poisson_tail(n_bar, n_max) >= tail_tol:
        n_max += 1
        if n_max > hard_max:
            raise TruncationError(
                f"mean photon number {n_bar:g} needs a cutoff above the hard maximum {hard_max}"
            )
    return FockCutoff(n_max)


def _coherent_vector(alpha: complex, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Unnormalized Fock magnitudes and phases of |alpha>, built in log space."""
    n = np.arange(dim)
    if alpha == 0:
        mag = np.zeros(dim)
        mag[0] = 1.0
        return mag, np.zeros(dim)
    log_mag = n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1) - 0.5 * abs(alpha) ** 2
    return np.exp(log_mag), n * float(np.angle(alpha))


def coherent_state(alpha_h: complex, alpha_v: complex, cutoff, tail_tol: float = 1e-12) -> TwoModeState:
    """Truncated, renormalized product coherent state |alpha_h, alpha_v>."""
    if not 0 < tail_tol < 1:
        raise ValueError(f"tail_tol must lie in (0, 1), got {tail_tol!r}")
    cutoff = _as_cutoff(cutoff)
    for label, alpha in (("h", alpha_h), ("v", alpha_v)):
        tail = poisson_tail(abs(alpha) ** 2, cutoff.n_max)
        if tail > tail_tol:
            raise TruncationError(
                f"mode {label}: Poisson mass {tail:.3g} beyond n_max={cutoff.n_max} "
                f"exceeds tail_tol={tail_tol:g} for |alpha|^2={abs(alpha) ** 2:g}"
            )
    mag_h, ph_h = _coherent_vector(complex(alpha_h), cutoff.dim)
    mag_v, ph_v = _coherent_vector(complex(alpha_v), cutoff.dim)
    mag_h /= math.sqrt(np.sum(mag_h**2))
    mag_v /= math.sqrt(np.sum(mag_v**2))
    return TwoModeState(np.outer(mag_h, mag_v), ph_h[:, None] + ph_v[None, :], tail_tol=tail_tol)


def fock_state(n: int, m: int, cutoff, tail_tol: float = 1e-12) -> TwoModeState:
    cutoff = _as_cutoff(cutoff)
    mags = np.zeros((cutoff.dim, cutoff.dim))
    mags[n, m] = 1.0
    return TwoModeState(mags, np.zeros_like(mags), tail_tol=tail_tol)


def kerr_phases(cutoff, params: KerrParams) -> np.ndarray:
    """Eigenphases t*E(n, m) of the normal-ordered Kerr Hamiltonian.

    E(n, m) = [gamma_h n(n-1) + gamma_v m(m-1) + 2 gamma n m] / 2
    """
    cutoff = _as_cutoff(cutoff)
    n = np.arange(cutoff.dim, dtype=float)[:, None]
    m = np.arange(cutoff.dim, dtype=float)[None, :]
    energy = 0.5 * (params.gamma_h * n * (n - 1) + params.gamma_v * m * (m - 1) + 2 * params.gamma * n * m)
    return params.t * energy


def kerr_evolve(state: TwoModeState, params: KerrParams) -> TwoModeState:
    phases = state.phases - kerr_phases(state.cutoff, params)
    return TwoModeState(state.magnitudes, phases, tail_tol=state.tail_tol)


# Ladder bilinears acting on amplitude grids.
# A = a_h^dag a_v moves one photon v -> h; A^dag moves it back.


def _apply_a(psi: np.ndarray) -> np.ndarray:
    dim = psi.shape[0]
    k = np.arange(dim, dtype=float)
    out = np.zeros_like(psi)
    # (A psi)[n, m] = sqrt(n (m+1)) psi[n-1, m+1]
    out[1:, :-1] = np.sqrt(k[1:, None] * k[None, 1:]) * psi[:-1, 1:]
    return out


def _apply_a_dag(psi: np.ndarray) -> np.ndarray:
    dim = psi.shape[0]
    k = np.arange(dim, dtype=float)
    out = np.zeros_like(psi)
    # (A^dag psi)[n, m] = sqrt((n+1) m) psi[n+1, m-1]
    out[:-1, 1:] = np.sqrt(k[1:, None] * k[None, 1:]) * psi[1:, :-1]
    return out


def _inner(a: np.ndarray, b: np.ndarray) -> complex:
    # np.sum over a contiguous 1-D buffer uses pairwise summation
    return complex(np.sum((np.conj(a) * b).ravel()))


def _norm2(a: np.ndarray) -> float:
    return float(np.sum((np.abs(a) ** 2).ravel()))


def _check_boundary(state: TwoModeState):
    mass = state.boundary_mass()
    if mass > state.tail_tol:
        warnings.warn(
            f"{mass:.3g} of the probability lies in the top two Fock shells "
            f"(n_max={state.cutoff.n_max}); moments may be truncation-corrupted",
            BoundaryWarning,
            stacklevel=3,
        )


def apply_stokes(psi: np.ndarray) -> list[np.ndarray]:
    """Return [S0 psi, S1 psi, S2 psi, S3 psi] on an amplitude grid."""
    dim = psi.shape[0]
    n = np.arange(dim, dtype=float)[:, None]
    m = np.arange(dim, dtype=float)[None, :]
    a_psi = _apply_a(psi)
    ad_psi = _apply_a_dag(psi)
    return [(n + m) * psi, (n - m) * psi, a_psi + ad_psi, 1j * (ad_psi - a_psi)]


def stokes_moments(state: TwoModeState) -> StokesMoments:
    """Means, second moments and variances of S0..S3 by direct summation."""
    _check_boundary(state)
    psi = state.amplitudes
    images = apply_stokes(psi)
    mean = np.array([_inner(psi, img).real for img in images])
    # truncated S_i are Hermitian, so <S_i^2> = ||S_i psi||^2
    second = np.array([_norm2(img) for img in images])
    variance = second - mean**2
    a_psi = _apply_a(psi)
    cross = _inner(psi, a_psi)
    pair = _inner(psi, _apply_a(a_psi))
    return StokesMoments(mean=mean, second=second, variance=variance, cross=cross, pair=pair)


def stokes_theta(state: TwoModeState, theta: float) -> tuple[float, float]:
    """Mean and variance of S_theta = S2 cos(theta) + S3 sin(theta).

    S_theta = exp(-i theta) A + exp(i theta) A^dag is applied to the grid
    directly, so the S2/S3 covariance is included.
    """
    _check_boundary(state)
    psi = state.amplitudes
    image = np.exp(-1j * theta) * _apply_a(psi) + np.exp(1j * theta) * _apply_a_dag(psi)
    mean = _inner(psi, image).real
    return mean, _norm2(image) - mean**2


def build_stokes_matrices(cutoff) -> tuple[sparse.csr_matrix, ...]:
    """Sparse S0..S3 on the truncated space, basis index n*(n_max+1) + m."""
    cutoff = _as_cutoff(cutoff)
    if cutoff.n_max < 2:
        raise ValueError("build_stokes_matrices needs n_max >= 2")
    d = cutoff.dim
    a = sparse.diags(np.sqrt(np.arange(1, d, dtype=float)), 1, shape=(d, d), format="csr")
    eye = sparse.identity(d, format="csr")
    a_h = sparse.kron(a, eye, format="csr")
    a_v = sparse.kron(eye, a, format="csr")
    n_h = a_h.T @ a_h
    n_v = a_v.T @ a_v
    s0 = n_h + n_v
    s1 = n_h - n_v
    s2 = a_h.T @ a_v + a_v.T @ a_h
    s3 = 1j * (a_v.T @ a_h - a_h.T @ a_v)
    return tuple(sparse.csr_matrix(s, dtype=np.complex128) for s in (s0, s1, s2, s3))


def total_photon_basis(cutoff, max_total: int) -> list[int]:
    """Flat indices of basis states |n, m> with n + m <= max_total."""
    cutoff = _as_cutoff(cutoff)
    d = cutoff.dim
    return [n * d + m for n in range(d) for m in range(d) if n + m <= max_total]
