"""Small-scale invariant checks across all modules, used by ``kerrpol selftest``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import exact_stokes_moments
from .detection import apply_efficiency, from_db, infer_source, to_db
from .fock import (
    build_stokes_matrices,
    coherent_state,
    kerr_evolve,
    stokes_moments,
    total_photon_basis,
)
from .linearized import linearized_variances
from .params import KerrParams

CANONICAL = dict(alpha_h=2.0, alpha_v=0.5, params=KerrParams(1e-3, 2e-4, 3e-4, 1.0), n_max=60)


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual)) and self.residual <= self.tolerance

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark}  {self.name:<46s} residual={self.residual:.3e}  tol={self.tolerance:.1e}"


def _commutator_residual(mats, i, j, k, n_max=6, max_total=4) -> float:
    comm = mats[i] @ mats[j] - mats[j] @ mats[i] - 2j * mats[k]
    cols = total_photon_basis(n_max, max_total)
    return float(np.max(np.abs(comm[:, cols].toarray())))


def _relative(a, b, floor=1.0) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.maximum(np.abs(b), floor)))


def run_selftest(matrix_builder=build_stokes_matrices) -> list[Check]:
    checks = []
    mats = matrix_builder(6)
    for i, j, k in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        checks.append(Check(f"commutator [S{i},S{j}] = 2i S{k}", _commutator_residual(mats, i, j, k), 1e-12))
    herm = max(float(abs(m - m.conj().T).max()) for m in mats)
    checks.append(Check("Stokes matrices Hermitian", herm, 0.0))
    cols = total_photon_basis(6, 4)
    s0_comm = max(float(np.max(np.abs((mats[0] @ m - m @ mats[0])[:, cols].toarray()))) for m in mats[1:])
    checks.append(Check("S0 commutes with S1..S3", s0_comm, 1e-12))

    rng = np.random.default_rng(20240601)
    unitarity = number = v01 = 0.0
    triplet = -math.inf
    for _ in range(10):
        a_h = 2.0 * rng.random() * np.exp(2j * np.pi * rng.random())
        a_v = 1.0 * rng.random() * np.exp(2j * np.pi * rng.random())
        params = KerrParams(*rng.uniform(-0.2, 0.2, size=3), t=1.0)
        before = coherent_state(a_h, a_v, 40)
        after = kerr_evolve(before, params)
        unitarity = max(unitarity, abs(after.norm() - before.norm()))
        number = max(number, float(np.max(np.abs(after.probabilities() - before.probabilities()))))
        m0, m1 = stokes_moments(before), stokes_moments(after)
        v01 = max(v01, _relative(m1.variance[:2], m0.variance[:2]))
        for slack, rhs in zip(m1.uncertainty_residuals(), (m1.mean[3] ** 2, m1.mean[1] ** 2, m1.mean[2] ** 2)):
            triplet = max(triplet, -slack / max(rhs, 1.0))
    checks.append(Check("Kerr evolution preserves norm", unitarity, 1e-14))
    checks.append(Check("Kerr evolution preserves photon statistics", number, 0.0))
    checks.append(Check("V0, V1 unchanged by evolution", v01, 1e-10))
    checks.append(Check("uncertainty triplet (violation)", max(triplet, 0.0), 1e-8))

    c = CANONICAL
    fock = stokes_moments(kerr_evolve(coherent_state(c["alpha_h"], c["alpha_v"], c["n_max"]), c["params"]))
    exact = exact_stokes_moments(c["alpha_h"], c["alpha_v"], c["params"])
    checks.append(Check("fock vs analytic, canonical point", _relative(fock.variance, exact.variance), 1e-8))
    coh = exact_stokes_moments(1.3, 0.7j, KerrParams())
    checks.append(Check("coherent baseline V_i = n_total", _relative(coh.variance, 1.3**2 + 0.7**2), 1e-12))

    lin = linearized_variances(1e3, 10.0, KerrParams(1e-5, 2e-6, 1e-6))
    checks.append(Check("linearized sum rule V2 + V3", abs(lin.v2 + lin.v3 - 2 * lin.v_coh) / lin.v_coh, 1e-15))

    loss = max(
        abs(apply_efficiency(1.0, 0.81) - 1.0),
        abs(apply_efficiency(apply_efficiency(0.3, 0.9), 0.8) - apply_efficiency(0.3, 0.72)),
        abs(infer_source(apply_efficiency(0.3, 0.81), 0.81) - 0.3),
    )
    checks.append(Check("loss model fixed point, composition, inverse", loss, 1e-12))
    db = max(abs(from_db(to_db(v)) - v) for v in (10 ** -0.52, 10 ** -0.64, 1.0))
    checks.append(Check("dB round trip", db, 1e-12))
    return checks


def report(checks) -> str:
    lines = [check.line() for check in checks]
    failed = sum(not check.passed for check in checks)
    lines.append(f"{len(checks) - failed}/{len(checks)} checks passed")
    return "\n".join(lines)
