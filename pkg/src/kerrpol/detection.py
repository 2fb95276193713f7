"""Shot-noise normalization, decibels and detector-efficiency loss.

Variances are normalized to the coherent-state level of the same total flux
(0 dB). Finite quantum efficiency eta is a beam splitter that mixes in vacuum:
V' = eta V + (1 - eta) on normalized variances.

Worked example kept for reference: a reading of -5.2 dB (0.302) detected at
eta = 0.81 infers a source variance of about 0.138, i.e. -8.6 dB, not the
-6.4 dB quoted with the measurement. Whatever correction produced that figure
is not this model, and none is guessed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


def _check_eta(eta: float):
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"efficiency must lie in (0, 1], got {eta!r}")


def apply_efficiency(v_rel: float, eta: float) -> float:
    """Normalized variance seen by a detector of efficiency ``eta``."""
    _check_eta(eta)
    if v_rel < 0:
        raise DomainError(f"normalized variance must be >= 0, got {v_rel!r}")
    return eta * v_rel + (1.0 - eta)


def infer_source(v_detected: float, eta: float) -> float:
    """Invert apply_efficiency; a reading below the vacuum floor 1 - eta is rejected."""
    _check_eta(eta)
    floor = 1.0 - eta
    if v_detected < floor:
        raise DomainError(
            f"reading {v_detected!r} is below the vacuum floor {floor!r} for eta={eta!r}"
        )
    return (v_detected - floor) / eta


def to_db(v_rel: float) -> float:
    if not v_rel > 0:
        raise DomainError(f"dB needs a positive normalized variance, got {v_rel!r}")
    return 10.0 * math.log10(v_rel)


def from_db(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class NoiseReading:
    """One variance expressed in the usual normalizations.

    ``v_rel_coh`` and ``v_rel_s1`` describe the source; ``db`` is the
    detected level after efficiency ``eta`` (equal to the source level for
    eta = 1).
    """

    v_abs: float
    v_rel_coh: float
    v_rel_s1: float
    db: float
    eta: float = 1.0

    @property
    def db_source(self) -> float:
        return to_db(self.v_rel_coh)


def noise_reading(v_abs: float, n_h: float, n_v: float, eta: float = 1.0) -> NoiseReading:
    """Normalize an absolute Stokes variance (photon-number units).

    ``v_rel_s1`` divides by |<S1>| = |n_h - n_v| and is infinite for
    balanced modes.
    """
    total = n_h + n_v
    if total <= 0:
        raise DomainError("shot-noise normalization needs a nonzero mean photon number")
    v_rel_coh = v_abs / total
    imbalance = abs(n_h - n_v)
    v_rel_s1 = v_abs / imbalance if imbalance > 0 else math.inf
    db = to_db(apply_efficiency(v_rel_coh, eta))
    return NoiseReading(v_abs=v_abs, v_rel_coh=v_rel_coh, v_rel_s1=v_rel_s1, db=db, eta=eta)
