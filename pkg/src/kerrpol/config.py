"""Config files: TOML with four flat sections.

    [engine]   name = "fock" | "analytic" | "linearized"
               n_max, tail_tol, hard_max (fock only), workers
    [params]   n_h | alpha_h, n_v | alpha_v, phase_h, phase_v,
               gamma_h, gamma_v, gamma, t = 1, eta = 1, theta = 0, power_mode
    [grid]     axis, and either values = [...] or start, stop, num
    [outputs]  columns = [...]

A document without [grid] is a single-point config. Unknown sections or keys
are errors, never ignored.
"""

from __future__ import annotations

import math
import re

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError, ParseError, RangeError, SchemaError
from .sweep import DEFAULT_OUTPUTS, CutoffPolicy, PointConfig, PointParams, SweepConfig

SECTIONS = {
    "engine": {"name", "n_max", "tail_tol", "hard_max", "workers"},
    "params": {"n_h", "alpha_h", "n_v", "alpha_v", "phase_h", "phase_v", "gamma_h", "gamma_v", "gamma",
               "t", "eta", "theta", "power_mode"},
    "grid": {"axis", "values", "start", "stop", "num"},
    "outputs": {"columns"},
}
REQUIRED_PARAMS = ("gamma_h", "gamma_v", "gamma")

_SECTION_RE = re.compile(r"^\s*\[\s*([^\]\s]+)\s*\]")


def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    current = None
    key_re = re.compile(rf"^\s*[\"']?{re.escape(key)}[\"']?\s*=") if key else None
    for lineno, line in enumerate(text.splitlines(), start=1):
        match = _SECTION_RE.match(line)
        if match:
            current = match.group(1)
            if key is None and current == section:
                return lineno
            continue
        if key_re is not None and current == section and key_re.match(line):
            return lineno
    return None


class _Reader:
    """Typed access to one section with line-numbered diagnostics."""

    def __init__(self, text, section, data):
        self.text, self.section, self.data = text, section, data

    def line(self, key=None):
        return _line_of(self.text, self.section, key) if key else _line_of(self.text, self.section)

    def schema_error(self, message, key):
        return SchemaError(message, key=f"{self.section}.{key}", line=self.line(key) or self.line())

    def range_error(self, message, key):
        return RangeError(message, key=f"{self.section}.{key}", line=self.line(key))

    def number(self, key, default=None, required=False):
        if key not in self.data:
            if required:
                raise SchemaError(f"missing required key {key!r}", key=key, line=self.line())
            return default
        value = self.data[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.schema_error(f"{key} must be a number, got {value!r}", key)
        if not math.isfinite(value):
            raise self.range_error(f"{key} must be finite", key)
        return float(value)

    def integer(self, key, default=None):
        if key not in self.data:
            return default
        value = self.data[key]
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.schema_error(f"{key} must be an integer, got {value!r}", key)
        return value

    def string(self, key, default=None, required=False):
        if key not in self.data:
            if required:
                raise SchemaError(f"missing required key {key!r}", key=key, line=self.line())
            return default
        value = self.data[key]
        if not isinstance(value, str):
            raise self.schema_error(f"{key} must be a string, got {value!r}", key)
        return value


def _amplitude(reader: _Reader, mode: str, default_n: float | None):
    """(n, extra phase) from n_<mode> or a real alpha_<mode>."""
    n_key, a_key = f"n_{mode}", f"alpha_{mode}"
    if n_key in reader.data and a_key in reader.data:
        raise reader.schema_error(f"give either {n_key} or {a_key}, not both", a_key)
    if a_key in reader.data:
        alpha = reader.number(a_key)
        return alpha * alpha, (math.pi if alpha < 0 else 0.0)
    if default_n is None and n_key not in reader.data:
        raise SchemaError(f"missing required key {n_key!r} (or {a_key!r})", key=n_key, line=reader.line())
    n = reader.number(n_key, default=default_n)
    if n < 0:
        raise reader.range_error(f"{n_key} must be >= 0, got {n!r}", n_key)
    return n, 0.0


def _params(reader: _Reader) -> tuple[PointParams, str | None]:
    n_h, extra_h = _amplitude(reader, "h", None)
    n_v, extra_v = _amplitude(reader, "v", 0.0)
    rates = {key: reader.number(key, required=True) for key in REQUIRED_PARAMS}
    t = reader.number("t", 1.0)
    if t < 0:
        raise reader.range_error(f"t must be >= 0, got {t!r}", "t")
    eta = reader.number("eta", 1.0)
    if not 0 < eta <= 1:
        raise reader.range_error(f"eta must lie in (0, 1], got {eta!r}", "eta")
    params = PointParams(
        n_h=n_h,
        n_v=n_v,
        phase_h=reader.number("phase_h", 0.0) + extra_h,
        phase_v=reader.number("phase_v", 0.0) + extra_v,
        t=t,
        eta=eta,
        theta=reader.number("theta", 0.0),
        **rates,
    )
    return params, reader.string("power_mode")


def _grid(reader: _Reader) -> tuple[str, tuple[float, ...]]:
    axis = reader.string("axis", required=True)
    has_values = "values" in reader.data
    has_range = any(k in reader.data for k in ("start", "stop", "num"))
    if has_values == has_range:
        raise SchemaError("grid needs exactly one of 'values' or 'start'/'stop'/'num'", key="grid.values",
                          line=reader.line())
    if has_values:
        values = reader.data["values"]
        if not isinstance(values, list) or any(isinstance(v, bool) or not isinstance(v, (int, float))
                                               for v in values):
            raise reader.schema_error("values must be a list of numbers", "values")
        return axis, tuple(float(v) for v in values)
    for key in ("start", "stop", "num"):
        if key not in reader.data:
            raise SchemaError(f"missing required key {key!r}", key=f"grid.{key}", line=reader.line())
    num = reader.integer("num")
    if num < 0:
        raise reader.range_error("num must be >= 0", "num")
    start, stop = reader.number("start"), reader.number("stop")
    return axis, tuple(np.linspace(start, stop, num).tolist())


def parse_config(text: str) -> PointConfig | SweepConfig:
    """Validate a config document; returns a PointConfig or a SweepConfig."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        match = re.search(r"line (\d+)", str(err))
        raise ParseError(f"invalid TOML: {err}", line=int(match.group(1)) if match else None) from err

    for section, body in doc.items():
        if section not in SECTIONS:
            raise SchemaError(f"unknown section [{section}]", key=section, line=_line_of(text, section))
        if not isinstance(body, dict):
            raise SchemaError(f"{section} must be a table", key=section, line=_line_of(text, section))
        for key in body:
            if key not in SECTIONS[section]:
                raise SchemaError(f"unknown key {key!r} in [{section}]", key=f"{section}.{key}",
                                  line=_line_of(text, section, key))
    for section in ("engine", "params"):
        if section not in doc:
            raise SchemaError(f"missing section [{section}]", key=section)

    engine = _Reader(text, "engine", doc["engine"])
    name = engine.string("name", required=True)
    hard_max = engine.integer("hard_max", CutoffPolicy.hard_max)
    tail_tol = engine.number("tail_tol", CutoffPolicy.tail_tol)
    if not 0 < tail_tol < 1:
        raise engine.range_error(f"tail_tol must lie in (0, 1), got {tail_tol!r}", "tail_tol")
    cutoff = CutoffPolicy(n_max=engine.integer("n_max"), tail_tol=tail_tol, hard_max=hard_max)
    workers = engine.integer("workers", 1)

    params, power_mode = _params(_Reader(text, "params", doc["params"]))

    outputs = DEFAULT_OUTPUTS
    if "outputs" in doc:
        out = _Reader(text, "outputs", doc["outputs"])
        columns = doc["outputs"].get("columns")
        if not isinstance(columns, list) or not all(isinstance(c, str) for c in columns):
            raise out.schema_error("columns must be a list of strings", "columns")
        outputs = tuple(columns)

    try:
        if "grid" not in doc:
            if power_mode is not None:
                raise SchemaError("power_mode only applies to seed_ratio sweeps", key="params.power_mode",
                                  line=_line_of(text, "params", "power_mode"))
            return PointConfig(engine=name, fixed=params, outputs=outputs, cutoff=cutoff)
        axis, grid = _grid(_Reader(text, "grid", doc["grid"]))
        return SweepConfig(engine=name, axis=axis, grid=grid, fixed=params, outputs=outputs,
                           power_mode=power_mode, cutoff=cutoff, workers=workers)
    except ConfigError as err:
        if err.line is not None or err.key is None:
            raise
        # attach a line number to errors raised while building the dataclasses
        short = err.key.split(".")[-1]
        for section in SECTIONS:
            line = _line_of(text, section, short)
            if line is not None:
                raise type(err)(str(err).split(" [key")[0], key=f"{section}.{short}", line=line) from err
        raise


def load_config(path) -> PointConfig | SweepConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err.strerror}") from err
    return parse_config(text)
