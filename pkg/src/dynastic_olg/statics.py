"""Comparative statics of the steady state.

Parameter sweeps, central finite-difference derivatives across two solves,
and a sign report that sets the observed signs against the expected
signs for (tau, alpha, phi, theta) x (fertility, per-child human
capital, savings, mental-health share).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, fields

from .errors import InvalidGrid, ValidationError
from .solver import SolverOptions, solve_steady_state

__all__ = [
    "PARAMETERS",
    "OUTCOMES",
    "EXPECTED_SIGNS",
    "SweepRow",
    "ReportCell",
    "SignReport",
    "sweep",
    "outcome_value",
    "finite_diff_sign",
    "table1_report",
]

PARAMETERS = ("tau", "alpha", "phi", "theta")
# per-child human capital is measured by the steady-state wage
OUTCOMES = ("n", "human_capital", "s", "mh_share")
OUTCOME_LABELS = {
    "n": "fertility",
    "human_capital": "per-child human capital",
    "s": "savings",
    "mh_share": "mental-health share",
}
EXPECTED_SIGNS = {
    "tau": ("+", "-", "-", "0"),
    "alpha": ("+", "+", "?", "0"),
    "phi": ("-", "+", "?", "0"),
    "theta": ("-", "+", "?", "+"),
}
ZERO_ELASTICITY = 1e-6
SHARE_TOL = 1e-12
STABILITY_TOL = 0.05


@dataclass(frozen=True)
class SweepRow:
    param_name: str
    param_value: float
    status: str
    n: float = math.nan
    w: float = math.nan
    e: float = math.nan
    hp: float = math.nan
    hm: float = math.nan
    s: float = math.nan
    c1: float = math.nan
    c2: float = math.nan
    ph: float = math.nan
    V: float = math.nan
    mh_share: float = math.nan

    @classmethod
    def columns(cls):
        return tuple(f.name for f in fields(cls))

    @classmethod
    def from_state(cls, name, value, state):
        a = state.alloc
        return cls(name, value, "Converged", n=a.n, w=state.w, e=a.e, hp=a.hp, hm=a.hm,
                   s=a.s, c1=a.c1, c2=a.c2, ph=a.ph, V=state.V, mh_share=a.mh_share)

    @property
    def converged(self):
        return self.status == "Converged"


def _with(params, name, value):
    if name not in params.as_dict():
        raise InvalidGrid(f"unknown sweep parameter {name!r}")
    try:
        return params.replace(**{name: float(value)})
    except ValidationError as exc:
        raise InvalidGrid(f"{name} = {value!r} leaves the parameter domain: {exc}") from exc


def sweep(params, param_name, grid, opts=None):
    """Solve the steady state at each value of ``grid`` for one parameter.

    Every grid value is validated before any solve. Points that fail to
    converge keep their row, with the solver status and NaN outcomes.
    """
    grid = [float(v) for v in grid]
    if not grid:
        raise InvalidGrid("empty grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidGrid("grid values must be strictly ascending")
    points = [_with(params, param_name, v) for v in grid]
    rows = []
    for value, p in zip(grid, points):
        out = solve_steady_state(p, opts)
        if out.converged:
            rows.append(SweepRow.from_state(param_name, value, out.state))
        else:
            rows.append(SweepRow(param_name, value, out.status.value))
    return rows


def outcome_value(state, outcome):
    if outcome == "human_capital":
        return state.w
    if outcome == "mh_share":
        return state.mh_share
    if outcome in ("n", "s"):
        return getattr(state.alloc, outcome)
    raise KeyError(f"unknown outcome {outcome!r}")


def _classify(derivative, x, y):
    if not math.isfinite(derivative):
        return "?"
    elasticity = derivative * x / y if y != 0 else derivative * x
    if abs(elasticity) < ZERO_ELASTICITY:
        return "0"
    return "+" if derivative > 0 else "-"


class _Solves:
    """Memoised solves at relative perturbations of one parameter."""

    def __init__(self, params, opts):
        self.params, self.opts = params, opts
        self._cache = {}

    def state(self, name, rel):
        key = (name, rel)
        if key not in self._cache:
            x = getattr(self.params, name)
            p = self.params if rel == 0 else self.params.replace(**{name: x * (1 + rel)})
            self._cache[key] = solve_steady_state(p, self.opts)
        out = self._cache[key]
        if not out.converged:
            raise RuntimeError(f"solve at {name} * (1 + {rel!r}) failed: {out.status.value}")
        return out.state

    def derivative(self, name, outcome, h):
        x = getattr(self.params, name)
        up = outcome_value(self.state(name, h), outcome)
        down = outcome_value(self.state(name, -h), outcome)
        return (up - down) / (2 * h * x)


def finite_diff_sign(params, param_name, outcome_name, h=1e-4, opts=None):
    """Central-difference derivative of a steady-state outcome.

    The sign is ``"0"`` when the implied elasticity is below 1e-6 in
    magnitude. Raises ``RuntimeError`` if either solve fails.

    Returns:
        (derivative, sign)
    """
    solves = _Solves(params, opts)
    d = solves.derivative(param_name, outcome_name, h)
    base = outcome_value(solves.state(param_name, 0), outcome_name)
    return d, _classify(d, getattr(params, param_name), base)


@dataclass(frozen=True)
class ReportCell:
    parameter: str
    outcome: str
    expected: str
    observed: str
    derivative: float
    step: float
    agree: bool
    status: str = "Evaluated"

    COLUMNS = ("parameter", "outcome", "expected", "observed", "derivative", "step",
               "agree", "status")


@dataclass(frozen=True)
class SignReport:
    """The 4 x 4 grid of comparative-statics cells, row-major by parameter."""

    cells: tuple

    def __post_init__(self):
        keys = [(c.parameter, c.outcome) for c in self.cells]
        want = [(p, o) for p in PARAMETERS for o in OUTCOMES]
        if sorted(keys) != sorted(want) or len(set(keys)) != len(keys):
            raise ValueError("a sign report needs each parameter/outcome cell exactly once")

    def cell(self, parameter, outcome):
        for c in self.cells:
            if (c.parameter, c.outcome) == (parameter, outcome):
                return c
        raise KeyError((parameter, outcome))

    def disagreements(self):
        return [c for c in self.cells if not c.agree]

    def rows(self):
        for c in self.cells:
            yield [c.parameter, c.outcome, c.expected, c.observed, repr(float(c.derivative)),
                   repr(float(c.step)), "true" if c.agree else "false", c.status]

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(ReportCell.COLUMNS)
        writer.writerows(self.rows())
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
        reader = csv.reader(lines)
        header = next(reader)
        if tuple(header) != ReportCell.COLUMNS:
            raise ValueError(f"unexpected report header {header!r}")
        cells = []
        for row in reader:
            par, out, exp, obs, der, step, agree, status = row
            cells.append(ReportCell(par, out, exp, obs, float(der), float(step),
                                    agree == "true", status))
        return cls(tuple(cells))


def _evaluate_cell(solves, name, outcome, expected, h):
    step = h * getattr(solves.params, name)
    try:
        d = solves.derivative(name, outcome, h)
        base = outcome_value(solves.state(name, 0), outcome)
        if outcome == "mh_share" and expected == "0":
            shares = [outcome_value(solves.state(name, r), outcome) for r in (-h, 0, h)]
            observed = "0" if max(shares) - min(shares) <= SHARE_TOL else \
                _classify(d, getattr(solves.params, name), base)
            status = "Evaluated"
        else:
            observed = _classify(d, getattr(solves.params, name), base)
            d_half = solves.derivative(name, outcome, h / 2)
            scale = max(abs(d), abs(d_half))
            unstable = observed != "0" and abs(d - d_half) > STABILITY_TOL * scale
            status = "Unstable" if unstable else "Evaluated"
    except (RuntimeError, ValidationError):
        return ReportCell(name, outcome, expected, "", math.nan, step, expected == "?",
                          "Unevaluated")
    agree = expected == "?" or observed == expected
    return ReportCell(name, outcome, expected, observed, d, step, agree, status)


def table1_report(params, h=1e-4, opts=None):
    """Evaluate every cell of the comparative-statics table at ``params``.

    ``"?"`` cells always agree; the observed sign is recorded only.  Zero
    share cells are decided by the share identity across the perturbed
    solves rather than by the size of a derivative.
    """
    solves = _Solves(params, opts)
    cells = []
    for name in PARAMETERS:
        for outcome, expected in zip(OUTCOMES, EXPECTED_SIGNS[name]):
            cells.append(_evaluate_cell(solves, name, outcome, expected, h))
    return SignReport(tuple(cells))
