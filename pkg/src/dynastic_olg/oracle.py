"""Brute-force check of the steady state that uses no first-order condition.

A parent takes as given its own wage and a truncated continuation value for
each child, and searches a product grid over ``(n, e, hp, hm, ph, s)`` for
the allocation maximising

    flow(own allocation) + alpha * n * V_{T-1}(incumbent policy),

with ``c1`` and ``c2`` closed by the two budgets.  The grid is refined
around the best point for a fixed number of rounds.  The chosen allocation
then becomes the incumbent policy of the dynasty and its technology wage the
parent's wage; the search is repeated until the policy reproduces itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InfeasibleEverywhere
from .model import Allocation, utility_flow, wage_technology

__all__ = [
    "OracleOptions",
    "OracleResult",
    "truncated_value",
    "best_response",
    "oracle_search",
    "oracle_maximize",
]

DIMS = ("n", "e", "hp", "hm", "ph", "s")
LOG_DIMS = frozenset(DIMS) - {"s"}


@dataclass(frozen=True)
class OracleOptions:
    """Search settings.

    ``horizon`` truncates the dynasty after ``T`` descendant generations,
    ``grid_points`` is the per-dimension resolution and ``refine_rounds`` the
    number of zoom steps per search.  ``max_passes`` caps the policy
    iteration and ``pass_tol`` is its relative stopping tolerance.
    """

    horizon: int = 30
    grid_points: int = 15
    refine_rounds: int = 6
    max_passes: int = 12
    pass_tol: float = 1e-7

    def __post_init__(self):
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")
        if self.grid_points < 3:
            raise ValueError("grid_points must be >= 3")
        if self.refine_rounds < 1:
            raise ValueError("refine_rounds must be >= 1")
        if self.max_passes < 1:
            raise ValueError("max_passes must be >= 1")


@dataclass(frozen=True)
class OracleResult:
    alloc: Allocation
    w: float
    value: float
    passes: int
    converged: bool


def truncated_value(alloc, params, T):
    """Dynastic value of a stationary policy followed for ``T`` further
    generations, with nothing beyond them."""
    if T < 0:
        raise ValueError("T must be >= 0")
    flow = utility_flow(alloc, params)
    if not (alloc.e > 0 and alloc.hp > 0 and alloc.hm > 0):
        raise DomainError("quality spending must be > 0")
    weight = params.alpha * alloc.n
    v = 0.0
    for _ in range(T + 1):
        v = flow + weight * v
    return v


def _axis(lo, hi, count, log):
    if log:
        return np.exp(np.linspace(math.log(lo), math.log(hi), count))
    return np.linspace(lo, hi, count)


def _search_round(params, w, v_cont, axes):
    """Exhaustive evaluation of the objective on the product of ``axes``.

    Returns the best index tuple (in ``DIMS`` order) and its objective.
    """
    p = params
    n_ax, e_ax, hp_ax, hm_ax, ph_ax, s_ax = (axes[d] for d in DIMS)
    income = w * (1 - p.tau) + p.bequest
    q_cost = (e_ax[:, None, None] + hp_ax[None, :, None] + hm_ax[None, None, :]).ravel()
    w_child = (p.wbar * e_ax[:, None, None] ** p.eps * hp_ax[None, :, None] ** p.eta
               * hm_ax[None, None, :] ** p.theta).ravel()
    log_ph = p.gamma_ph * np.log(ph_ax)

    best_val, best_idx = -math.inf, None
    with np.errstate(divide="ignore", invalid="ignore"):
        for i, n in enumerate(n_ax):
            c2 = p.R * s_ax[:, None] + n * (p.tau * w_child - p.bequest)[None, :]
            u2 = p.gamma_c * np.log(np.maximum(c2, 0.0))
            c1 = (income - n * (p.phi + q_cost))[None, None, :] - ph_ax[:, None, None] \
                - s_ax[None, :, None]
            obj = p.gamma1 * np.log(np.maximum(c1, 0.0))
            obj += u2[None, :, :]
            obj += log_ph[:, None, None]
            obj += p.gamma2 * math.log(n) + p.alpha * n * v_cont
            j = int(np.argmax(obj))
            val = obj.flat[j]
            if val > best_val:
                best_val = float(val)
                i_ph, i_s, i_q = np.unravel_index(j, obj.shape)
                i_e, i_hp, i_hm = np.unravel_index(i_q, (len(e_ax), len(hp_ax), len(hm_ax)))
                best_idx = (i, int(i_e), int(i_hp), int(i_hm), int(i_ph), int(i_s))
    return best_idx, best_val


def best_response(params, w, v_cont, box, opts):
    """Grid-refined maximiser of the parent's objective inside ``box``.

    ``box`` maps each name in ``DIMS`` to a ``(lo, hi)`` interval; log-scaled
    dimensions must be positive.  Each round recentres on the best point and
    shrinks to three cells, unless the best point sits on the edge of the
    box, in which case the box is shifted without shrinking.

    Returns:
        (point dict, objective value)
    """
    g = opts.grid_points
    box = dict(box)
    point, val = None, -math.inf
    for _ in range(opts.refine_rounds):
        axes = {d: _axis(*box[d], g, d in LOG_DIMS) for d in DIMS}
        idx, val = _search_round(params, w, v_cont, axes)
        if idx is None or not math.isfinite(val):
            raise InfeasibleEverywhere("no grid point yields positive consumption")
        point = {d: float(axes[d][k]) for d, k in zip(DIMS, idx)}
        for d, k in zip(DIMS, idx):
            lo, hi = box[d]
            if d in LOG_DIMS:
                lo, hi, x = math.log(lo), math.log(hi), math.log(point[d])
            else:
                x = point[d]
            cell = (hi - lo) / (g - 1)
            half = 1.5 * cell if 0 < k < g - 1 else (hi - lo) / 2
            lo, hi = x - half, x + half
            box[d] = (math.exp(lo), math.exp(hi)) if d in LOG_DIMS else (lo, hi)
    return point, val


def _close_budgets(params, w, pt):
    p = params
    w_child = wage_technology(pt["e"], pt["hp"], pt["hm"], p)
    c1 = (w * (1 - p.tau) + p.bequest - pt["ph"] - pt["s"]
          - pt["n"] * (p.phi + pt["e"] + pt["hp"] + pt["hm"]))
    c2 = p.R * pt["s"] + p.tau * pt["n"] * w_child - pt["n"] * p.bequest
    return Allocation(c1=c1, c2=c2, b=p.bequest, **pt), w_child


def _wide_box(params, w):
    income = w * (1 - params.tau) + params.bequest
    n_hi = min(10.0, (1 - 1e-6) / params.alpha)
    box = {"n": (1e-3, n_hi), "s": (-income, income)}
    for d in ("e", "hp", "hm", "ph"):
        box[d] = (income * 1e-5, income)
    return box


def _warm_box(params, w, alloc):
    income = w * (1 - params.tau) + params.bequest
    box = {d: (getattr(alloc, d) / 2, getattr(alloc, d) * 2) for d in LOG_DIMS}
    half = max(0.5 * abs(alloc.s), 0.05 * income)
    box["s"] = (alloc.s - half, alloc.s + half)
    return box


def _rel_change(a, b):
    return max(abs(getattr(a, d) - getattr(b, d)) / max(abs(getattr(b, d)), 1e-300)
               for d in DIMS)


def oracle_search(params, opts=None):
    """Iterate the parent's grid-search best response to a stationary policy.

    The first passes search a wide box scaled by current income; once the
    wage has settled, passes search a box of factor two around the incumbent.
    """
    opts = opts or OracleOptions()
    w = params.wbar
    wage_moved = True
    incumbent = None
    value = -math.inf
    converged = False
    passes = 0
    for passes in range(1, opts.max_passes + 1):
        if incumbent is None or opts.horizon == 0:
            v_cont = 0.0
        else:
            v_cont = truncated_value(incumbent, params, opts.horizon - 1)
        if incumbent is None or wage_moved:
            box = _wide_box(params, w)
        else:
            box = _warm_box(params, w, incumbent)
        point, value = best_response(params, w, v_cont, box, opts)
        alloc, w_child = _close_budgets(params, w, point)
        done = incumbent is not None and _rel_change(alloc, incumbent) < opts.pass_tol \
            and abs(w_child - w) <= opts.pass_tol * w
        wage_moved = abs(w_child - w) > 0.05 * w
        incumbent, w = alloc, w_child
        if done:
            converged = True
            break
    return OracleResult(alloc=incumbent, w=w, value=value, passes=passes, converged=converged)


def oracle_maximize(params, opts=None):
    """Best stationary interior allocation found by the grid search."""
    return oracle_search(params, opts).alloc
