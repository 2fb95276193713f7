"""Parameter sweeps over the three engines, phase optimization and seed scans."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from . import __version__
from .analytic import exact_min_variance, exact_stokes_moments, exact_stokes_theta
from .detection import apply_efficiency, to_db
from .errors import KerrPolError, MultimodalWarning, RangeError, SchemaError, TruncationError
from .fock import (
    HARD_MAX_CUTOFF,
    FockCutoff,
    auto_cutoff,
    coherent_state,
    kerr_evolve,
    poisson_tail,
    stokes_moments,
    stokes_theta,
)
from .linearized import phase_phi, squeezing_factor, variances_at_phase
from .params import KerrParams

ENGINES = ("fock", "analytic", "linearized")
AXES = ("seed_ratio", "phase", "anisotropy", "theta", "time")
OUTPUTS = ("V2", "V3", "Vcoh", "Vtheta", "Vtheta_min", "S_exact", "S_approx", "db", "n_h", "n_v", "phi")
DEFAULT_OUTPUTS = ("V2", "V3", "Vcoh", "Vtheta_min", "S_exact", "S_approx", "db")
POWER_MODES = ("pump", "total")
FIXED_TIMESTAMP = "1970-01-01T00:00:00+00:00"
COARSE_POINTS = 256


@dataclass(frozen=True)
class PointParams:
    """Everything needed to evaluate one configuration.

    Amplitudes are given as mean photon numbers plus phases;
    alpha_j = sqrt(n_j) exp(i phase_j).
    """

    n_h: float
    n_v: float = 0.0
    phase_h: float = 0.0
    phase_v: float = 0.0
    gamma_h: float = 0.0
    gamma_v: float = 0.0
    gamma: float = 0.0
    t: float = 1.0
    eta: float = 1.0
    theta: float = 0.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not math.isfinite(value):
                raise RangeError(f"{name} must be finite, got {value!r}", key=name)
        if self.n_h < 0 or self.n_v < 0:
            raise RangeError("photon numbers must be >= 0", key="n_h" if self.n_h < 0 else "n_v")
        if self.t < 0:
            raise RangeError(f"t must be >= 0, got {self.t!r}", key="t")
        if not 0 < self.eta <= 1:
            raise RangeError(f"eta must lie in (0, 1], got {self.eta!r}", key="eta")

    @property
    def alpha_h(self) -> complex:
        return math.sqrt(self.n_h) * complex(math.cos(self.phase_h), math.sin(self.phase_h))

    @property
    def alpha_v(self) -> complex:
        return math.sqrt(self.n_v) * complex(math.cos(self.phase_v), math.sin(self.phase_v))

    @property
    def kerr(self) -> KerrParams:
        return KerrParams(self.gamma_h, self.gamma_v, self.gamma, self.t)


@dataclass(frozen=True)
class CutoffPolicy:
    """Fock truncation: a fixed n_max, or the smallest one meeting tail_tol."""

    n_max: int | None = None
    tail_tol: float = 1e-12
    hard_max: int = HARD_MAX_CUTOFF

    def __post_init__(self):
        if not 0 < self.tail_tol < 1:
            raise RangeError(f"tail_tol must lie in (0, 1), got {self.tail_tol!r}", key="tail_tol")
        if self.n_max is not None and not 1 <= self.n_max <= self.hard_max:
            raise RangeError(f"n_max must lie in [1, {self.hard_max}], got {self.n_max!r}", key="n_max")

    def cutoff_for(self, point: PointParams) -> FockCutoff:
        if self.n_max is not None:
            return FockCutoff(self.n_max)
        return auto_cutoff([point.alpha_h, point.alpha_v], self.tail_tol, self.hard_max)


def _check_engine(engine):
    if engine not in ENGINES:
        raise SchemaError(f"unknown engine {engine!r}; expected one of {ENGINES}", key="name")


def _check_outputs(outputs):
    for name in outputs:
        if name not in OUTPUTS:
            raise SchemaError(f"unknown output {name!r}; expected any of {OUTPUTS}", key="columns")


@dataclass(frozen=True)
class PointConfig:
    engine: str
    fixed: PointParams
    outputs: tuple[str, ...] = DEFAULT_OUTPUTS
    cutoff: CutoffPolicy = field(default_factory=CutoffPolicy)

    def __post_init__(self):
        _check_engine(self.engine)
        _check_outputs(self.outputs)
        if self.engine == "fock":
            _check_fock_cap(self.cutoff, [self.fixed])


@dataclass(frozen=True)
class SweepConfig:
    """A one-dimensional scan of ``axis`` over ``grid`` with the rest held at ``fixed``.

    On the seed_ratio axis, ``power_mode`` 'pump' keeps n_h and sets
    n_v = ratio n_h; 'total' keeps n_h + n_v (taken from ``fixed``) constant.
    None defers to the caller's default ('pump' for run_sweep, 'total' for
    seed_scan).
    """

    engine: str
    axis: str
    grid: tuple[float, ...]
    fixed: PointParams
    outputs: tuple[str, ...] = DEFAULT_OUTPUTS
    power_mode: str | None = None
    cutoff: CutoffPolicy = field(default_factory=CutoffPolicy)
    workers: int = 1

    def __post_init__(self):
        _check_engine(self.engine)
        _check_outputs(self.outputs)
        if self.axis not in AXES:
            raise SchemaError(f"unknown axis {self.axis!r}; expected one of {AXES}", key="axis")
        if self.power_mode is not None and self.power_mode not in POWER_MODES:
            raise SchemaError(f"power_mode must be one of {POWER_MODES}", key="power_mode")
        grid = tuple(float(x) for x in self.grid)
        object.__setattr__(self, "grid", grid)
        if not all(math.isfinite(x) for x in grid):
            raise RangeError("grid values must be finite", key="values")
        steps = np.diff(grid)
        if steps.size and not (np.all(steps > 0) or np.all(steps < 0)):
            raise RangeError("grid must be strictly monotone", key="values")
        if self.workers < 1:
            raise RangeError("workers must be >= 1", key="workers")
        if self.axis == "seed_ratio" and any(x < 0 for x in grid):
            raise RangeError("seed ratios must be >= 0", key="values")
        if self.axis == "time" and any(x < 0 for x in grid):
            raise RangeError("times must be >= 0", key="values")
        if self.engine == "fock":
            _check_fock_cap(self.cutoff, [self.point_at(x) for x in grid])

    def point_at(self, value: float, default_power_mode: str = "pump") -> PointParams:
        fixed = self.fixed
        if self.axis == "seed_ratio":
            mode = self.power_mode or default_power_mode
            if mode == "pump":
                return replace(fixed, n_v=value * fixed.n_h)
            total = fixed.n_h + fixed.n_v
            return replace(fixed, n_h=total / (1.0 + value), n_v=total * value / (1.0 + value))
        if self.axis == "phase":
            return replace(fixed, phase_v=fixed.phase_v + value)
        if self.axis == "anisotropy":
            return replace(fixed, gamma_v=fixed.gamma_h - value)
        if self.axis == "theta":
            return replace(fixed, theta=value)
        return replace(fixed, t=value)


def _check_fock_cap(policy: CutoffPolicy, points):
    for point in points:
        try:
            cutoff = policy.cutoff_for(point)
            for n_bar in (point.n_h, point.n_v):
                if poisson_tail(n_bar, cutoff.n_max) > policy.tail_tol:
                    raise TruncationError(f"n_max={cutoff.n_max} too small for mean photon number {n_bar:g}")
        except TruncationError as err:
            raise RangeError(f"fock engine rejected: {err}", key="n_h") from err


@dataclass
class SweepTable:
    schema: list[str]
    rows: list[dict]
    metadata: dict

    def column(self, name: str) -> np.ndarray:
        """Numeric column with error cells as NaN."""
        return np.array([np.nan if row[name] is None else row[name] for row in self.rows], dtype=float)

    def __eq__(self, other):
        if not isinstance(other, SweepTable):
            return NotImplemented
        return (self.schema, self.rows, self.metadata) == (other.schema, other.rows, other.metadata)


class PhaseOptimum(NamedTuple):
    """Result of optimize_phase.

    ``angle`` is phi (linearized engine: the cross-term phase at the optimum) or
    theta (analytic and fock engines: the S_theta measurement angle).
    """

    angle: float
    v_min: float
    flat: bool
    multimodal: bool
    variable: str


# -- evaluation ------------------------------------------------------------


def _fock_state(point: PointParams, policy: CutoffPolicy):
    state = coherent_state(point.alpha_h, point.alpha_v, policy.cutoff_for(point), policy.tail_tol)
    return kerr_evolve(state, point.kerr)


def _objective(point: PointParams, engine: str, policy: CutoffPolicy) -> tuple[Callable[[float], float], str]:
    """Function of one angle to minimize over a period of pi."""
    if engine == "linearized":
        dg = point.kerr.anisotropy
        phi0 = phase_phi(point.alpha_h, point.alpha_v, point.kerr)

        def f(x):
            return variances_at_phase(point.n_h, point.n_v, dg, phi0 + x)[0]

        return f, "phi"
    if engine == "analytic":
        kerr = point.kerr
        return (lambda x: exact_stokes_theta(point.alpha_h, point.alpha_v, kerr, x)[1]), "theta"
    state = _fock_state(point, policy)
    return (lambda x: stokes_theta(state, x)[1]), "theta"


def minimize_periodic(f: Callable[[float], float], period: float = math.pi, coarse: int = COARSE_POINTS):
    """Coarse scan of one period followed by golden-section refinement.

    Returns (x_min, f_min, flat, multimodal).
    """
    xs = np.arange(coarse) * (period / coarse)
    ys = np.array([f(x) for x in xs])
    k = int(np.argmin(ys))
    scale = max(float(np.max(np.abs(ys))), 1.0)
    if float(np.max(ys) - np.min(ys)) <= 1e-12 * scale:
        return 0.0, float(ys[k]), True, False

    left, right = np.roll(ys, 1), np.roll(ys, -1)
    minima = ys[(ys < left) & (ys <= right)]
    multimodal = minima.size >= 2 and float(np.max(minima) - np.min(minima)) > 1e-6 * scale

    h = period / coarse
    a, b, c = xs[k] - h, xs[k], xs[k] + h
    x_best, y_best = float(xs[k]), float(ys[k])
    try:
        res = minimize_scalar(f, bracket=(a, b, c), method="golden", options={"xtol": 1e-12})
        if res.fun <= y_best:
            x_best, y_best = float(res.x), float(res.fun)
    except ValueError:
        # neighbours tie with the centre: the coarse point is already a minimum
        pass
    return x_best % period, y_best, False, multimodal


def optimize_phase(point: PointParams, engine: str, cutoff: CutoffPolicy | None = None) -> PhaseOptimum:
    """Minimize the S2-type variance over one period of the free angle.

    linearized: scans the relative input phase and minimizes V2 (returns phi).
    analytic, fock: scans the measurement angle of S_theta (returns theta).
    """
    _check_engine(engine)
    policy = cutoff or CutoffPolicy()
    f, variable = _objective(point, engine, policy)
    x, v_min, flat, multimodal = minimize_periodic(f)
    if multimodal:
        warnings.warn("phase scan found several distinct local minima; returning the global one",
                      MultimodalWarning, stacklevel=2)
    angle = x
    if variable == "phi":
        angle = phase_phi(point.alpha_h, point.alpha_v, point.kerr) + x
    return PhaseOptimum(float(angle), float(v_min), flat, multimodal, variable)


def _engine_values(point: PointParams, engine: str, outputs, policy: CutoffPolicy) -> dict:
    """Raw engine quantities needed for ``outputs``; may raise domain errors."""
    need = set(outputs)
    out = {}
    if engine == "linearized":
        phi = phase_phi(point.alpha_h, point.alpha_v, point.kerr)
        v2, v3 = variances_at_phase(point.n_h, point.n_v, point.kerr.anisotropy, phi)
        out.update(V2=v2, V3=v3, phi=phi)
        # the linearized model carries no S2-S3 covariance
        c, s = math.cos(point.theta), math.sin(point.theta)
        out["Vtheta"] = v2 * c * c + v3 * s * s
        out["Vtheta_min"] = min(v2, v3)
    elif engine == "analytic":
        m = exact_stokes_moments(point.alpha_h, point.alpha_v, point.kerr)
        out.update(V2=m.variance[2], V3=m.variance[3], phi=m.phase)
        out["Vtheta"] = exact_stokes_theta(point.alpha_h, point.alpha_v, point.kerr, point.theta)[1]
        out["Vtheta_min"] = exact_min_variance(point.alpha_h, point.alpha_v, point.kerr).v_min
    else:
        state = _fock_state(point, policy)
        m = stokes_moments(state)
        out.update(V2=m.variance[2], V3=m.variance[3], phi=float(np.angle(m.cross)))
        if "Vtheta" in need:
            out["Vtheta"] = stokes_theta(state, point.theta)[1]
        if "Vtheta_min" in need or "db" in need:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", MultimodalWarning)
                out["Vtheta_min"] = optimize_phase(point, "fock", policy).v_min
    return out


def evaluate_point(point: PointParams, engine: str, outputs=DEFAULT_OUTPUTS,
                   cutoff: CutoffPolicy | None = None) -> tuple[dict, str]:
    """Evaluate one grid point; returns ({output: value or None}, status).

    Failing cells are None and the status lists what failed; nothing raises
    for domain problems at a single point.
    """
    policy = cutoff or CutoffPolicy()
    errors = []
    try:
        raw = _engine_values(point, engine, outputs, policy)
    except KerrPolError as err:
        raw = {}
        errors.append(f"{engine}: {err}")
    v_coh = point.n_h + point.n_v
    cells = {}
    for name in outputs:
        try:
            if name == "Vcoh":
                value = v_coh
            elif name in ("n_h", "n_v"):
                value = getattr(point, name)
            elif name in ("S_exact", "S_approx"):
                s_exact, s_approx = squeezing_factor(point.n_h, point.n_v, point.kerr.anisotropy)
                value = s_exact if name == "S_exact" else s_approx
            elif name == "db":
                if "Vtheta_min" not in raw:
                    raise KerrPolError("no variance available")
                if v_coh == 0:
                    raise KerrPolError("vacuum input has no shot-noise reference")
                value = to_db(apply_efficiency(raw["Vtheta_min"] / v_coh, point.eta))
            else:
                if name not in raw:
                    raise KerrPolError("engine failed")
                value = raw[name]
            value = float(value)
            if not math.isfinite(value):
                raise KerrPolError(f"non-finite value {value!r}")
            cells[name] = value
        except (KerrPolError, ValueError) as err:
            cells[name] = None
            if str(err) != "engine failed":
                errors.append(f"{name}: {err}")
    return cells, ("ok" if not errors else "error: " + "; ".join(errors))


def _metadata(kind: str, engine: str, fixed: PointParams, fixed_metadata: bool, **extra) -> dict:
    stamp = FIXED_TIMESTAMP if fixed_metadata else datetime.now(timezone.utc).isoformat(timespec="seconds")
    meta = {"kind": kind, "engine": engine, "fixed": asdict(fixed), "tool": "kerrpol", "version": __version__,
            "timestamp": stamp}
    meta.update(extra)
    return meta


def _map_ordered(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map preserves input order regardless of completion order
        return list(pool.map(fn, items))


def run_sweep(config: SweepConfig, fixed_metadata: bool = False) -> SweepTable:
    schema = [config.axis, *config.outputs, "status"]

    def row_for(value):
        cells, status = evaluate_point(config.point_at(value), config.engine, config.outputs, config.cutoff)
        return {config.axis: value, **cells, "status": status}

    rows = _map_ordered(row_for, config.grid, config.workers)
    meta = _metadata("sweep", config.engine, config.fixed, fixed_metadata, axis=config.axis,
                     power_mode=config.power_mode or "pump")
    return SweepTable(schema=schema, rows=rows, metadata=meta)


SEED_COLUMNS = ("ratio", "n_h", "n_v", "v_min", "S", "gain", "noise_rel_coh", "db", "status")


def seed_scan(fixed: PointParams, ratios, engine: str = "linearized", power_mode: str = "total",
              cutoff: CutoffPolicy | None = None, fixed_metadata: bool = False) -> SweepTable:
    """Optimal compression versus seed-to-pump ratio.

    Per ratio: the minimal variance (linearized: over the input phase;
    analytic and fock: over the measurement angle), S = v_min/|<S1>| and the
    squeezing gain 1 - S. With power_mode 'total' the total photon number of
    ``fixed`` is held constant.
    """
    config = SweepConfig(engine=engine, axis="seed_ratio", grid=tuple(ratios), fixed=fixed,
                         outputs=("n_h",), power_mode=power_mode, cutoff=cutoff or CutoffPolicy())
    policy = config.cutoff

    def row_for(ratio):
        point = config.point_at(ratio)
        row = dict.fromkeys(SEED_COLUMNS)
        row.update(ratio=ratio, n_h=point.n_h, n_v=point.n_v)
        try:
            if engine == "linearized":
                v_min = optimize_phase(point, engine, policy).v_min
            elif engine == "analytic":
                v_min = exact_min_variance(point.alpha_h, point.alpha_v, point.kerr).v_min
            else:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", MultimodalWarning)
                    v_min = optimize_phase(point, engine, policy).v_min
            s1 = abs(point.n_h - point.n_v)
            if s1 == 0:
                raise KerrPolError("|<S1>| = 0, compression ratio undefined")
            s = v_min / s1
            v_coh = point.n_h + point.n_v
            row.update(v_min=v_min, S=s, gain=1.0 - s, noise_rel_coh=v_min / v_coh)
            row["db"] = to_db(apply_efficiency(v_min / v_coh, point.eta))
            row["status"] = "ok"
        except (KerrPolError, ValueError) as err:
            row["status"] = f"error: {err}"
        return row

    rows = _map_ordered(row_for, config.grid, config.workers)
    meta = _metadata("seed-scan", engine, fixed, fixed_metadata, axis="seed_ratio", power_mode=power_mode)
    return SweepTable(schema=list(SEED_COLUMNS), rows=rows, metadata=meta)
