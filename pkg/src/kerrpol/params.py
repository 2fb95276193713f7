"""Value types shared by the three computation paths."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class KerrParams:
    """Dimensionless Kerr rates and interaction time.

    ``gamma_h`` and ``gamma_v`` are the self-phase-modulation rates of the two
    polarization modes, ``gamma`` the cross-phase-modulation rate. hbar is
    absorbed into the rates. Every engine only ever sees the products
    ``rate * t`` (the accumulated phases).
    """

    gamma_h: float = 0.0
    gamma_v: float = 0.0
    gamma: float = 0.0
    t: float = 1.0

    def __post_init__(self):
        for name in ("gamma_h", "gamma_v", "gamma", "t"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.t < 0:
            raise ValueError(f"t must be >= 0, got {self.t!r}")

    @property
    def theta_h(self) -> float:
        """Accumulated phase per h photon seen by a transferred photon, t(gamma_h - gamma)."""
        return self.t * (self.gamma_h - self.gamma)

    @property
    def theta_v(self) -> float:
        return self.t * (self.gamma_v - self.gamma)

    @property
    def anisotropy(self) -> float:
        """t(gamma_h - gamma_v)."""
        return self.t * (self.gamma_h - self.gamma_v)

    def swapped(self) -> "KerrParams":
        """Parameters with the h and v labels exchanged."""
        return replace(self, gamma_h=self.gamma_v, gamma_v=self.gamma_h)


@dataclass(frozen=True)
class StokesMoments:
    """First and second moments of S0..S3.

    ``cross`` is <a_h^dag a_v>; ``pair`` is <a_h^dag^2 a_v^2>. Together with
    the photon-number moments they determine every quantity here.
    """

    mean: np.ndarray
    second: np.ndarray
    variance: np.ndarray
    cross: complex
    pair: complex = 0j

    @property
    def covariance23(self) -> float:
        """Symmetrized covariance of S2 and S3."""
        return 2.0 * float(np.imag(self.pair - self.cross**2))

    def variance_theta(self, theta: float) -> float:
        """Var(S2 cos(theta) + S3 sin(theta)) from the stored moments."""
        v_mid = 0.5 * (self.variance[2] + self.variance[3])
        z = (self.pair - self.cross**2) * np.exp(-2j * theta)
        return float(v_mid + 2.0 * z.real)

    def uncertainty_residuals(self) -> tuple[float, float, float]:
        """Slack of V1V2 >= <S3>^2 and its cyclic partners (non-negative when satisfied)."""
        v, m = self.variance, self.mean
        return (
            float(v[1] * v[2] - m[3] ** 2),
            float(v[2] * v[3] - m[1] ** 2),
            float(v[3] * v[1] - m[2] ** 2),
        )
