"""Closed-form Stokes moments of Kerr-evolved two-mode coherent states.

Everything follows from two expectation values in the evolved state,

    X = <a_h^dag a_v>   and   Y = <a_h^dag^2 a_v^2>,

plus the Poisson photon statistics, which the Kerr Hamiltonian leaves
untouched. With the coherent-state identity <exp(i s n)> = exp(nbar(e^{is} - 1)):

    X = conj(alpha_h) alpha_v exp[n_h (e^{i th_h} - 1) + n_v (e^{-i th_v} - 1)]
    Y / X^2 = exp[i (th_h - th_v) + n_h (e^{i th_h} - 1)^2 + n_v (e^{-i th_v} - 1)^2]

where th_h = t(gamma_h - gamma), th_v = t(gamma_v - gamma). Writing
S_theta = e^{-i theta} A + e^{i theta} A^dag with A = a_h^dag a_v gives

    Var S_theta = V_mid + 2 Re[(Y - X^2) e^{-2 i theta}]
    V_mid       = n_h + n_v + 2 n_h n_v - 2 |X|^2

See docs/derivation.md for the full working.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .params import KerrParams, StokesMoments


@dataclass(frozen=True)
class ExactMoments(StokesMoments):
    """StokesMoments from the closed forms, with a few phase diagnostics."""

    @property
    def phase(self) -> float:
        """arg <a_h^dag a_v>; reduces to the linearized phi at small rates."""
        return float(np.angle(self.cross))

    @property
    def coherence(self) -> float:
        """|<a_h^dag a_v>| / sqrt(n_h n_v), 1 for an unevolved coherent state."""
        n_h = 0.5 * (self.mean[0] + self.mean[1])
        n_v = 0.5 * (self.mean[0] - self.mean[1])
        if n_h == 0 or n_v == 0:
            return 1.0
        return float(abs(self.cross) / math.sqrt(n_h * n_v))


class MinVariance(NamedTuple):
    theta: float
    v_min: float
    degenerate: bool


def _phase_factor_minus_one(theta: float) -> complex:
    # e^{i theta} - 1 without cancellation in the real part
    return complex(-2.0 * math.sin(0.5 * theta) ** 2, math.sin(theta))


def _core(alpha_h: complex, alpha_v: complex, params: KerrParams):
    """Return (n_h, n_v, X, Z = Y - X^2, V_mid)."""
    alpha_h, alpha_v = complex(alpha_h), complex(alpha_v)
    n_h, n_v = abs(alpha_h) ** 2, abs(alpha_v) ** 2
    total = n_h + n_v
    if n_h == 0 or n_v == 0:
        return n_h, n_v, 0j, 0j, total

    e_h = _phase_factor_minus_one(params.theta_h)
    e_v = _phase_factor_minus_one(-params.theta_v)
    exponent = n_h * e_h + n_v * e_v
    log_x = complex(math.log(abs(alpha_h) * abs(alpha_v)), np.angle(alpha_v) - np.angle(alpha_h)) + exponent
    cross = complex(np.exp(log_x))

    d = 1j * params.anisotropy + n_h * e_h**2 + n_v * e_v**2
    log_x2 = 2 * log_x
    if abs(d) < 1.0:
        z = complex(np.exp(log_x2) * np.expm1(d))
    else:
        # Re(log_x2 + d) <= 2 log|alpha_h alpha_v|, so neither term overflows
        z = complex(np.exp(log_x2 + d) - np.exp(log_x2))

    # 2 n_h n_v - 2|X|^2 = -2 n_h n_v expm1(2 Re(exponent))
    v_mid = total - 2.0 * n_h * n_v * math.expm1(2.0 * exponent.real)
    return n_h, n_v, cross, z, v_mid


def exact_stokes_moments(alpha_h: complex, alpha_v: complex, params: KerrParams) -> ExactMoments:
    """Exact S0..S3 moments after Kerr evolution of |alpha_h, alpha_v>."""
    n_h, n_v, cross, z, v_mid = _core(alpha_h, alpha_v, params)
    total = n_h + n_v
    mean = np.array([total, n_h - n_v, 2.0 * cross.real, 2.0 * cross.imag])
    variance = np.array([total, total, v_mid + 2.0 * z.real, v_mid - 2.0 * z.real])
    second = variance + mean**2
    return ExactMoments(mean=mean, second=second, variance=variance, cross=cross, pair=z + cross**2)


def exact_stokes_theta(alpha_h: complex, alpha_v: complex, params: KerrParams, theta: float) -> tuple[float, float]:
    """Mean and variance of S2 cos(theta) + S3 sin(theta)."""
    _, _, cross, z, v_mid = _core(alpha_h, alpha_v, params)
    mean = 2.0 * (cross * np.exp(-1j * theta)).real
    return float(mean), float(v_mid + 2.0 * (z * np.exp(-2j * theta)).real)


def exact_min_variance(
    alpha_h: complex, alpha_v: complex, params: KerrParams, rel_tol: float = 1e-12
) -> MinVariance:
    """Minimum of Var S_theta over theta, in closed form.

    The variance is V_mid + 2|Z| cos(arg Z - 2 theta), minimized at
    theta = (arg Z - pi)/2 (reported in [0, pi)). When |Z| is negligible the
    noise ellipse is a circle; theta is then arbitrary and 0 is returned with
    ``degenerate`` set.
    """
    _, _, _, z, v_mid = _core(alpha_h, alpha_v, params)
    if abs(z) <= rel_tol * max(abs(v_mid), 1.0):
        return MinVariance(0.0, float(v_mid + 2.0 * z.real), True)
    theta = (np.angle(z) - math.pi) / 2.0
    return MinVariance(float(theta % math.pi), float(v_mid - 2.0 * abs(z)), False)
