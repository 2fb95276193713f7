"""Small-rate model for the Stokes variances of a Kerr-evolved coherent state.

The rates enter only as accumulated phases, i.e. every gamma is multiplied
by t before use. With n_h, n_v the mean photon numbers and
dg = t(gamma_h - gamma_v):

    phi = arg(conj(alpha_h) alpha_v) + n_h sin(t(gamma_h - gamma)) - n_v sin(t(gamma_v - gamma))
    V2  = n_h + n_v - 2 dg n_h n_v sin(2 phi)
    V3  = n_h + n_v + 2 dg n_h n_v sin(2 phi)

and the best achievable compression relative to |<S1>| is

    S_exact  = (n_h + n_v - 2|dg| n_h n_v) / |n_h - n_v|
    S_approx = 1 - 2|dg| n_v

phi coincides with arg <a_h^dag a_v> of the exact solution; the variances
are the first-order expansion of the exact ones in the rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivisionDomainError
from .params import KerrParams

# |dg| * max(n) above this leaves the linear regime
LINEAR_LIMIT = 0.3
# 2 min(n) (n_h th_h^2 + n_v th_v^2): excess noise from number-dependent phase spread
DIFFUSION_LIMIT = 0.01
# S_approx regime: n_v/n_h at most this, and |dg| n_h at least APPROX_MIN_GAIN
APPROX_MAX_RATIO = 1e-2
APPROX_MIN_GAIN = 100.0


@dataclass(frozen=True)
class LinearizedResult:
    v2: float
    v3: float
    phi: float
    s_exact: float
    s_approx: float
    v_coh: float
    valid: bool
    approx_valid: bool

    @property
    def v_min(self) -> float:
        return min(self.v2, self.v3)


def phase_phi(alpha_h: complex, alpha_v: complex, params: KerrParams) -> float:
    """Relative phase entering the variances (not reduced modulo 2 pi)."""
    n_h, n_v = abs(alpha_h) ** 2, abs(alpha_v) ** 2
    base = float(np.angle(np.conj(alpha_h) * alpha_v))
    return base + n_h * math.sin(params.theta_h) - n_v * math.sin(params.theta_v)


def squeezing_factor(n_h: float, n_v: float, dgamma_abs: float) -> tuple[float, float]:
    """Optimal S_theta variance over |<S1>|, exact ratio and n_v << n_h form.

    Raises DivisionDomainError for n_h == n_v; the error carries ``s_approx``.
    """
    dgamma_abs = abs(dgamma_abs)
    s_approx = 1.0 - 2.0 * dgamma_abs * n_v
    if n_h == n_v:
        err = DivisionDomainError(f"S_exact undefined for n_h == n_v == {n_h:g}")
        err.s_approx = s_approx
        raise err
    s_exact = (n_h + n_v - 2.0 * dgamma_abs * n_h * n_v) / abs(n_h - n_v)
    return s_exact, s_approx


def validity(n_h: float, n_v: float, params: KerrParams) -> tuple[bool, bool]:
    """(linear regime holds, S_approx regime holds)."""
    dg = abs(params.anisotropy)
    linear = dg * max(n_h, n_v) <= LINEAR_LIMIT
    spread = 2.0 * min(n_h, n_v) * (n_h * params.theta_h**2 + n_v * params.theta_v**2)
    linear = linear and spread <= DIFFUSION_LIMIT
    approx = n_h > 0 and n_v <= APPROX_MAX_RATIO * n_h and dg * n_h >= APPROX_MIN_GAIN
    return linear, approx


def variances_at_phase(n_h: float, n_v: float, dgamma: float, phi: float) -> tuple[float, float]:
    """V2, V3 for given photon numbers, signed t(gamma_h - gamma_v) and phase."""
    total = n_h + n_v
    term = 2.0 * dgamma * n_h * n_v * math.sin(2.0 * phi)
    return total - term, total + term


def linearized_variances(alpha_h: complex, alpha_v: complex, params: KerrParams) -> LinearizedResult:
    n_h, n_v = abs(alpha_h) ** 2, abs(alpha_v) ** 2
    phi = phase_phi(alpha_h, alpha_v, params)
    v2, v3 = variances_at_phase(n_h, n_v, params.anisotropy, phi)
    try:
        s_exact, s_approx = squeezing_factor(n_h, n_v, params.anisotropy)
    except DivisionDomainError as err:
        s_exact, s_approx = math.nan, err.s_approx
    valid, approx_valid = validity(n_h, n_v, params)
    return LinearizedResult(
        v2=v2,
        v3=v3,
        phi=phi,
        s_exact=s_exact,
        s_approx=s_approx,
        v_coh=n_h + n_v,
        valid=valid,
        approx_valid=approx_valid,
    )
