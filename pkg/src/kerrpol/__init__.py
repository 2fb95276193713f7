"""Polarization squeezing of two-mode coherent light in a Kerr medium.

Three routes to the Stokes-operator statistics:

- ``fock``: brute-force truncated two-mode Fock space (reference oracle)
- ``analytic``: exact closed forms valid at any photon number
- ``linearized``: the small-rate model V2, V3 = n_h + n_v -/+ 2 dg n_h n_v sin(2 phi)

plus readout normalization (``detection``) and parameter scans (``sweep``).
"""

__version__ = "0.1.0"

from .params import KerrParams, StokesMoments  # noqa: E402
from .fock import (  # noqa: E402
    FockCutoff,
    TwoModeState,
    auto_cutoff,
    build_stokes_matrices,
    coherent_state,
    kerr_evolve,
    stokes_moments,
    stokes_theta,
)
from .analytic import ExactMoments, exact_min_variance, exact_stokes_moments, exact_stokes_theta  # noqa: E402
from .linearized import LinearizedResult, linearized_variances, phase_phi, squeezing_factor  # noqa: E402
from .detection import NoiseReading, apply_efficiency, from_db, infer_source, noise_reading, to_db  # noqa: E402

__all__ = [
    "KerrParams", "StokesMoments", "FockCutoff", "TwoModeState", "auto_cutoff", "build_stokes_matrices",
    "coherent_state", "kerr_evolve", "stokes_moments", "stokes_theta", "ExactMoments", "exact_min_variance",
    "exact_stokes_moments", "exact_stokes_theta", "LinearizedResult", "linearized_variances", "phase_phi",
    "squeezing_factor", "NoiseReading", "apply_efficiency", "from_db", "infer_source", "noise_reading", "to_db",
]
