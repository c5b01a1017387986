"""Scenario files: flat ``key = value`` text, one pair per line.

Blank lines and ``#`` comments are ignored.  Every model parameter must be
present; solver and oracle settings are optional.  ``bequest`` is either
``zero`` or a nonnegative decimal.

Optional keys and their defaults::

    name           unnamed
    residual_tol   1e-10
    max_iter       200
    n_min, n_max   1e-3, min(10, (1 - 1e-6) / alpha)
    lam_min        1e-6
    lam_max        1e6
    polish         newton        (or: bisection)
    scan_intervals 100
    horizon        30
    grid_points    15
    refine_rounds  6
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError, ValidationError
from .model import ModelParameters
from .oracle import OracleOptions
from .solver import Polish, SolverOptions, default_n_bracket

__all__ = ["ScenarioConfig", "parse_config", "load_config", "MODEL_KEYS", "OPTION_KEYS"]

MODEL_KEYS = ("gamma1", "gamma_ph", "gamma2", "gamma_c", "alpha", "tau", "phi", "wbar",
              "eps", "eta", "theta", "R", "bequest")
SOLVER_KEYS = ("residual_tol", "max_iter", "n_min", "n_max", "lam_min", "lam_max",
               "polish", "scan_intervals")
ORACLE_KEYS = ("horizon", "grid_points", "refine_rounds")
OPTION_KEYS = ("name",) + SOLVER_KEYS + ORACLE_KEYS
INT_KEYS = {"max_iter", "scan_intervals", "horizon", "grid_points", "refine_rounds"}
POLISH_NAMES = {"newton": Polish.NEWTON, "bisection": Polish.BISECTION_ONLY}


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    params: ModelParameters
    solver: SolverOptions = field(default_factory=SolverOptions)
    oracle: OracleOptions = field(default_factory=OracleOptions)


def _number(key, raw, lineno):
    try:
        if key in INT_KEYS:
            return int(raw)
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as a number", lineno, key) from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite", lineno, key)
    return value


def parse_config(text):
    """Parse scenario text into a validated :class:`ScenarioConfig`.

    Raises:
        ConfigError: malformed line, unknown or duplicate key, bad number, or
            a missing model parameter (``line`` is 0 for missing keys).
        ValidationError: the parameters violate a model invariant.
    """
    values = {}
    lines = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw_line.strip()!r}", lineno)
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in MODEL_KEYS and key not in OPTION_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno, key)
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (first on line {lines[key]})", lineno, key)
        if not raw:
            raise ConfigError(f"{key}: missing value", lineno, key)
        if key == "name":
            value = raw
        elif key == "polish":
            if raw not in POLISH_NAMES:
                raise ConfigError(f"polish must be one of {sorted(POLISH_NAMES)}", lineno, key)
            value = POLISH_NAMES[raw]
        elif key == "bequest" and raw == "zero":
            value = 0.0
        else:
            value = _number(key, raw, lineno)
            if key == "bequest" and value < 0:
                raise ConfigError("bequest must be 'zero' or a nonnegative decimal", lineno, key)
        values[key] = value
        lines[key] = lineno

    missing = [k for k in MODEL_KEYS if k not in values]
    if missing:
        raise ConfigError(f"missing required key {missing[0]!r}", 0, missing[0])

    params = ModelParameters(**{k: values[k] for k in MODEL_KEYS})
    try:
        solver = _solver_options(values, params)
        oracle = OracleOptions(**{k: values[k] for k in ORACLE_KEYS if k in values})
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    return ScenarioConfig(name=values.get("name", "unnamed"), params=params,
                          solver=solver, oracle=oracle)


def _solver_options(values, params):
    kw = {k: values[k] for k in ("residual_tol", "max_iter", "polish", "scan_intervals")
          if k in values}
    if "n_min" in values or "n_max" in values:
        lo, hi = default_n_bracket(params)
        kw["bracket"] = (values.get("n_min", lo), values.get("n_max", hi))
    if "lam_min" in values or "lam_max" in values:
        lo, hi = SolverOptions().lam_bracket
        kw["lam_bracket"] = (values.get("lam_min", lo), values.get("lam_max", hi))
    return SolverOptions(**kw)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
