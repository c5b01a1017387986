"""Steady-state solver.

The quality, consumption, savings and wage conditions are eliminated
analytically, leaving two unknowns: the young-period shadow price ``lam``
and fertility ``n``.  Given ``n`` the young budget is linear in ``1/lam``;
the remaining fertility condition is bracketed on a log-spaced scan of
``n`` and bisected, then the pair ``(lam, n)`` is polished by Newton's
method on the two reduced residuals.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergentDynasty
from .model import (
    Allocation,
    ShadowPrices,
    SteadyState,
    dynasty_value,
    foc_residuals,
    steady_state_wage,
    utility_flow,
)

__all__ = [
    "Polish",
    "Status",
    "SolverOptions",
    "SolveTrace",
    "SolveOutcome",
    "ReducedSystem",
    "reduce_system",
    "scan_fertility",
    "solve_steady_state",
    "verify_state",
    "default_n_bracket",
    "invariant_violations",
]

N_FLOOR = 1e-3
N_CEILING = 10.0
DYNASTY_MARGIN = 1e-6


class Polish(enum.Enum):
    NEWTON = "NewtonPolish"
    BISECTION_ONLY = "BisectionOnly"


class Status(enum.Enum):
    CONVERGED = "Converged"
    NO_BRACKET = "NoBracket"
    MAX_ITER_EXCEEDED = "MaxIterExceeded"
    DIVERGENT_DYNASTY = "DivergentDynasty"
    NON_INTERIOR = "NonInterior"


def default_n_bracket(params):
    return N_FLOOR, min(N_CEILING, (1 - DYNASTY_MARGIN) / params.alpha)


@dataclass(frozen=True)
class SolverOptions:
    """Numerical settings.

    ``bracket`` is the search interval for fertility; ``None`` selects
    ``[1e-3, min(10, (1 - 1e-6) / alpha)]``.  ``lam_bracket`` bounds the
    admissible young-period shadow price.
    """

    residual_tol: float = 1e-10
    max_iter: int = 200
    bracket: tuple | None = None
    lam_bracket: tuple = (1e-6, 1e6)
    polish: Polish = Polish.NEWTON
    scan_intervals: int = 100

    def __post_init__(self):
        if not self.residual_tol > 0:
            raise ValueError("residual_tol must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.scan_intervals < 1:
            raise ValueError("scan_intervals must be >= 1")
        for lo, hi in filter(None, (self.bracket, self.lam_bracket)):
            if not (0 < lo < hi):
                raise ValueError(f"bracket must satisfy 0 < lower < upper, got {(lo, hi)!r}")

    def n_bracket(self, params):
        return self.bracket if self.bracket is not None else default_n_bracket(params)


@dataclass
class SolveTrace:
    """Iteration log: ``steps`` holds ``(n, fertility residual)`` pairs in
    evaluation order; ``flags`` collects notable events such as
    ``"MultipleRoots"``."""

    steps: list = field(default_factory=list)
    flags: set = field(default_factory=set)
    roots: list = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def log(self, n, residual):
        self.steps.append((float(n), float(residual)))


@dataclass
class SolveOutcome:
    status: Status
    state: SteadyState | None
    trace: SolveTrace
    message: str = ""

    @property
    def converged(self):
        return self.status is Status.CONVERGED


class ReducedSystem:
    """Steady-state residuals as a function of ``(lam, n)`` only.

    Calling the instance returns ``(r_by, r_n)``: the young-budget slack and
    the fertility condition, after substituting the closed-form wage and
    quality spending, ``c1 = g1/lam``, ``ph = g_ph/lam``, ``c2 = g_c R/lam``,
    ``mu = lam/R`` and savings from the retirement budget.
    """

    def __init__(self, params):
        self.params = params
        p = params
        self.w, self.e, self.hp, self.hm = steady_state_wage(p)
        self.q = p.phi + self.e + self.hp + self.hm
        # net resources per child: discounted pension minus bequest, rearing
        # and quality costs
        self.k = (p.tau * self.w - p.bequest) / p.R - self.q
        self.income0 = self.w * (1 - p.tau) + p.bequest

    def income(self, n):
        """Present value of lifetime resources at fertility ``n``."""
        return self.income0 + n * self.k

    def allocation(self, lam, n):
        p = self.params
        c2 = p.gamma_c * p.R / lam
        s = (c2 + n * p.bequest - p.tau * n * self.w) / p.R
        return Allocation(c1=p.gamma1 / lam, c2=c2, ph=p.gamma_ph / lam, s=s, n=n,
                          e=self.e, hp=self.hp, hm=self.hm, b=p.bequest)

    def value(self, lam, n):
        return dynasty_value(utility_flow(self.allocation(lam, n), self.params), n, self.params)

    def __call__(self, lam, n):
        p = self.params
        alloc = self.allocation(lam, n)
        V = dynasty_value(utility_flow(alloc, p), n, p)
        r_by = self.income0 - alloc.c1 - alloc.ph - alloc.s - n * self.q
        r_n = p.gamma2 / n + p.alpha * V + lam * self.k
        return r_by, r_n

    def jacobian(self, lam, n):
        p = self.params
        one_m = 1 - p.alpha * n
        flow = utility_flow(self.allocation(lam, n), p)
        g = p.gamma_sum
        dV_dlam = -g / (lam * one_m)
        dV_dn = (p.gamma2 / n) / one_m + p.alpha * flow / one_m ** 2
        return np.array([
            [g / lam ** 2, self.k],
            [p.alpha * dV_dlam + self.k, -p.gamma2 / n ** 2 + p.alpha * dV_dn],
        ])

    def lam_given_n(self, n, lam_bracket=(1e-6, 1e6)):
        """Shadow price clearing the young budget at ``n``, or ``None``.

        ``r_by`` rises strictly in ``lam``; a root exists inside the bracket
        iff the residual changes sign across it.  The root itself is exact
        because the budget is linear in ``1/lam``.
        """
        lo, hi = lam_bracket
        g = self.params.gamma_sum
        income = self.income(n)
        r_lo, r_hi = income - g / lo, income - g / hi
        if not (r_lo < 0 < r_hi):
            return None
        return g / income

    def state(self, lam, n):
        """Expand ``(lam, n)`` into a full :class:`SteadyState`."""
        p = self.params
        alloc = self.allocation(lam, n)
        prices = ShadowPrices(lam=lam, mu=lam / p.R)
        V = dynasty_value(utility_flow(alloc, p), n, p)
        res = foc_residuals(alloc, prices, self.w, V, p)
        return SteadyState(alloc=alloc, prices=prices, w=self.w, V=V,
                           residual_norm=res.max_abs(), alpha_n=p.alpha * n)


def reduce_system(params):
    return ReducedSystem(params)


def _fertility_residual(system, n, lam_bracket):
    lam = system.lam_given_n(n, lam_bracket)
    if lam is None:
        return None, math.nan
    return lam, system(lam, n)[1]


def scan_fertility(params, opts=None):
    """Evaluate the fertility residual on the log-spaced bracket scan.

    Returns:
        (grid, residuals, sign_change_indices). Residuals are NaN where the
        candidate ``n`` is infeasible or divergent; index ``i`` marks a sign
        change between ``grid[i]`` and ``grid[i + 1]``.
    """
    opts = opts or SolverOptions()
    system = reduce_system(params)
    lo, hi = opts.n_bracket(params)
    grid = np.geomspace(lo, hi, opts.scan_intervals + 1)
    res = np.full(grid.shape, math.nan)
    for i, n in enumerate(grid):
        if params.alpha * n >= 1:
            continue
        res[i] = _fertility_residual(system, float(n), opts.lam_bracket)[1]
    changes = [i for i in range(len(grid) - 1)
               if np.isfinite(res[i]) and np.isfinite(res[i + 1])
               and (res[i] == 0 or res[i] * res[i + 1] < 0)]
    return grid, res, changes


def _bisect_n(system, lo, hi, r_lo, opts, trace):
    """Bisect the fertility residual in log n; returns the final midpoint."""
    for _ in range(opts.max_iter):
        mid = math.sqrt(lo * hi)
        if not lo < mid < hi:
            return mid, True
        _, r_mid = _fertility_residual(system, mid, opts.lam_bracket)
        trace.log(mid, r_mid)
        if r_mid == 0:
            return mid, True
        if (r_mid < 0) == (r_lo < 0):
            lo, r_lo = mid, r_mid
        else:
            hi = mid
    return math.sqrt(lo * hi), False


def _newton(system, lam, n, opts, trace, max_steps=30):
    """Damped Newton on the reduced pair; keeps the best iterate seen."""
    p = system.params
    lam_lo, lam_hi = opts.lam_bracket

    def norm(lam_, n_):
        try:
            return max(abs(r) for r in system(lam_, n_))
        except DivergentDynasty:
            return math.inf

    best = (norm(lam, n), lam, n)
    for _ in range(max_steps):
        f = np.array(system(lam, n))
        step = np.linalg.solve(system.jacobian(lam, n), -f)
        t = 1.0
        while t > 1e-8:
            lam_new, n_new = float(lam + t * step[0]), float(n + t * step[1])
            if (lam_lo <= lam_new <= lam_hi and n_new > 0 and p.alpha * n_new < 1
                    and norm(lam_new, n_new) < math.inf):
                break
            t *= 0.5
        else:
            break
        if (lam_new, n_new) == (lam, n):
            break
        lam, n = lam_new, n_new
        r = norm(lam, n)
        trace.log(n, system(lam, n)[1])
        if r < best[0]:
            best = (r, lam, n)
        elif r > best[0]:
            break
    return best[1], best[2]


def _polish(system, n, opts, trace):
    if opts.polish is Polish.BISECTION_ONLY:
        return system.lam_given_n(n, opts.lam_bracket), n
    n = float(f"{n:.10g}")  # canonical start: result independent of the bisection path
    lam = system.lam_given_n(n, opts.lam_bracket)
    if lam is None:
        return None, n
    return _newton(system, lam, n, opts, trace)


def _is_interior(alloc, tol):
    return all(getattr(alloc, k) > tol for k in Allocation.POSITIVE)


def solve_steady_state(params, opts=None):
    """Interior steady state of the household problem.

    Never raises for a valid parameter point; failures are reported through
    :attr:`SolveOutcome.status`.  When several sign changes are bracketed the
    root with the largest dynastic value is returned and the trace is flagged
    ``"MultipleRoots"``.
    """
    opts = opts or SolverOptions()
    trace = SolveTrace()
    system = reduce_system(params)
    lo, hi = opts.n_bracket(params)
    if params.alpha * lo >= 1:
        trace.flags.add("DivergentDynasty")
        return SolveOutcome(Status.DIVERGENT_DYNASTY, None, trace,
                            f"alpha * n >= 1 for every n in [{lo!r}, {hi!r}]")

    grid, res, changes = scan_fertility(params, opts)
    for n, r in zip(grid, res):
        trace.log(n, r)
    if not changes:
        if not np.isfinite(res).any():
            return SolveOutcome(Status.NON_INTERIOR, None, trace,
                                "no candidate fertility admits positive consumption")
        return SolveOutcome(Status.NO_BRACKET, None, trace,
                            "fertility condition does not change sign over the bracket")
    if len(changes) > 1:
        trace.flags.add("MultipleRoots")

    candidates = []
    last_failure = Status.MAX_ITER_EXCEEDED
    for i in changes:
        if res[i] == 0:
            n_root, ok = float(grid[i]), True
        else:
            n_root, ok = _bisect_n(system, float(grid[i]), float(grid[i + 1]),
                                   float(res[i]), opts, trace)
        lam, n = _polish(system, n_root, opts, trace)
        trace.roots.append(n)
        if lam is None:
            last_failure = Status.NON_INTERIOR
            continue
        if params.alpha * n >= 1:
            last_failure = Status.DIVERGENT_DYNASTY
            continue
        state = system.state(lam, n)
        if not _is_interior(state.alloc, opts.residual_tol):
            last_failure = Status.NON_INTERIOR
            continue
        if state.residual_norm > opts.residual_tol or (not ok and opts.polish is Polish.BISECTION_ONLY):
            last_failure = Status.MAX_ITER_EXCEEDED
            continue
        candidates.append(state)

    if not candidates:
        return SolveOutcome(last_failure, None, trace, "no bracketed root met the acceptance test")
    best = max(candidates, key=lambda st: st.V)
    return SolveOutcome(Status.CONVERGED, best, trace)


def verify_state(state, params):
    """Recompute all twelve residuals of ``state`` from their definitions."""
    return foc_residuals(state.alloc, state.prices, state.w, state.V, params)


def _rel(a, b):
    return abs(a - b) / abs(b)


def invariant_violations(state, params, residual_tol=1e-10, identity_tol=1e-12):
    """Names of the steady-state identities that ``state`` fails."""
    p, a = params, state.alloc
    checks = {
        "euler": _rel(a.c2 / a.c1, p.gamma_c / p.gamma1 * p.R),
        "parental_health": _rel(a.ph, p.gamma_ph / p.gamma1 * a.c1),
        "ratio_e_hp": _rel(a.e / a.hp, p.eps / p.eta),
        "ratio_e_hm": _rel(a.e / a.hm, p.eps / p.theta),
        "ratio_hp_hm": _rel(a.hp / a.hm, p.eta / p.theta),
        "mh_share": _rel(a.mh_share, p.theta / p.sigma),
    }
    bad = [k for k, v in checks.items() if not v <= identity_tol]
    w_tech = p.wbar * a.e ** p.eps * a.hp ** p.eta * a.hm ** p.theta
    if not abs(state.w - w_tech) <= 1e-10 * state.w:
        bad.append("wage_fixed_point")
    if not state.alpha_n < 1:
        bad.append("alpha_n")
    if not verify_state(state, params).max_abs() <= residual_tol:
        bad.append("residuals")
    return bad
