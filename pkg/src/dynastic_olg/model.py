"""Household problem of the dynastic two-period OLG economy.

The representative parent of generation t values

    V_t = g1 ln c1 + g_ph ln ph + g2 ln n + g_c ln c2 + alpha n V_{t+1}

subject to a working-period budget, a retirement-period budget financed by
savings and a PAYG pension on the children's wages, and a Cobb-Douglas
technology mapping per-child education, physical-health and mental-health
spending into the child's wage.

Everything here is a pure function of immutable values.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

from .errors import DivergentDynasty, DomainError, ValidationError

__all__ = [
    "ModelParameters",
    "Allocation",
    "ShadowPrices",
    "SteadyState",
    "ResidualVector",
    "CHOICE_VARIABLES",
    "FOC_NAMES",
    "utility_flow",
    "wage_technology",
    "budget_residuals",
    "foc_residuals",
    "lagrangian",
    "foc_lagrangian_scale",
    "allocation_ratios",
    "steady_state_wage",
    "dynasty_value",
]

ZERO_BEQUEST = "zero"
VALUE_BEQUEST = "value"


@dataclass(frozen=True)
class ModelParameters:
    """Exogenous constants of the economy.

    ``bequest`` is the steady-state transfer per child. ``bequest_mode`` is
    derived from it: ``"zero"`` for the default, ``"value"`` otherwise.
    Construction validates every invariant and raises
    :class:`~dynastic_olg.errors.ValidationError` on failure, so a
    ``ModelParameters`` instance is always a valid point of the domain.
    """

    gamma1: float
    gamma_ph: float
    gamma2: float
    gamma_c: float
    alpha: float
    tau: float
    phi: float
    wbar: float
    eps: float
    eta: float
    theta: float
    R: float
    bequest: float = 0.0

    def __post_init__(self):
        for name in ("gamma1", "gamma_ph", "gamma2", "gamma_c", "alpha", "phi",
                     "wbar", "eps", "eta", "theta", "R"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{name} must be finite and > 0, got {value!r}")
        if not (0 < self.tau < 1):
            raise ValidationError(f"tau must lie in (0, 1), got {self.tau!r}")
        if not (math.isfinite(self.bequest) and self.bequest >= 0):
            raise ValidationError(f"bequest must be finite and >= 0, got {self.bequest!r}")
        if not self.sigma < 1:
            raise ValidationError(
                f"eps + eta + theta must be < 1, got {self.sigma!r}")

    @property
    def sigma(self):
        """Returns to scale of the human-capital technology."""
        return self.eps + self.eta + self.theta

    @property
    def bequest_mode(self):
        return ZERO_BEQUEST if self.bequest == 0 else VALUE_BEQUEST

    @property
    def gamma_sum(self):
        """Total log weight on goods bought from lifetime income (c1, ph, c2)."""
        return self.gamma1 + self.gamma_ph + self.gamma_c

    def replace(self, **changes):
        """Return a validated copy with some fields changed."""
        return dataclasses.replace(self, **changes)

    def as_dict(self):
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class Allocation:
    """Choices of one generation. ``s`` may be negative (borrowing)."""

    c1: float
    c2: float
    ph: float
    s: float
    n: float
    e: float
    hp: float
    hm: float
    b: float = 0.0

    POSITIVE = ("c1", "c2", "ph", "n", "e", "hp", "hm")

    def as_dict(self):
        return dataclasses.asdict(self)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def is_interior(self):
        return all(getattr(self, k) > 0 for k in self.POSITIVE) and self.b >= 0

    @property
    def mh_share(self):
        """Fraction of quality spending devoted to mental health."""
        return self.hm / (self.e + self.hp + self.hm)


@dataclass(frozen=True)
class ShadowPrices:
    """Multipliers on the young (``lam``) and old (``mu``) budgets."""

    lam: float
    mu: float


@dataclass(frozen=True)
class SteadyState:
    alloc: Allocation
    prices: ShadowPrices
    w: float
    V: float
    residual_norm: float
    alpha_n: float

    @property
    def mh_share(self):
        return self.alloc.mh_share


RESIDUAL_FIELDS = ("r_c1", "r_c2", "r_s", "r_ph", "r_e", "r_hp", "r_hm", "r_n",
                   "r_by", "r_bo", "r_w", "r_V")
FOC_NAMES = RESIDUAL_FIELDS[:8]
CHOICE_VARIABLES = ("c1", "c2", "s", "ph", "e", "hp", "hm", "n")


@dataclass(frozen=True)
class ResidualVector:
    """Named residuals of the steady-state system; all vanish at a solution."""

    r_c1: float
    r_c2: float
    r_s: float
    r_ph: float
    r_e: float
    r_hp: float
    r_hm: float
    r_n: float
    r_by: float
    r_bo: float
    r_w: float
    r_V: float

    def as_dict(self):
        return {k: getattr(self, k) for k in RESIDUAL_FIELDS}

    def max_abs(self):
        return max(abs(v) for v in self.as_dict().values())

    def foc(self):
        """The eight first-order-condition entries, in ``FOC_NAMES`` order."""
        return tuple(getattr(self, k) for k in FOC_NAMES)


def _check_interior(alloc):
    for name in Allocation.POSITIVE:
        value = getattr(alloc, name)
        if not value > 0:
            raise DomainError(f"{name} must be > 0 at an interior point, got {value!r}")


def utility_flow(alloc, params):
    """Per-generation flow utility, i.e. the dynastic value without the
    altruistic continuation term."""
    for name in ("c1", "ph", "n", "c2"):
        if not getattr(alloc, name) > 0:
            raise DomainError(f"log argument {name} must be > 0, got {getattr(alloc, name)!r}")
    return (params.gamma1 * math.log(alloc.c1)
            + params.gamma_ph * math.log(alloc.ph)
            + params.gamma2 * math.log(alloc.n)
            + params.gamma_c * math.log(alloc.c2))


def wage_technology(e, hp, hm, params):
    """Child wage produced by per-child quality spending (Cobb-Douglas)."""
    if not (e > 0 and hp > 0 and hm > 0):
        raise DomainError(f"quality inputs must be > 0, got e={e!r}, hp={hp!r}, hm={hm!r}")
    return params.wbar * e ** params.eps * hp ** params.eta * hm ** params.theta


def budget_residuals(alloc, w, params):
    """Slack of the working-period and retirement-period budgets.

    The child's wage in the retirement budget comes from the technology at
    the allocation's quality spending.

    Returns:
        (r_by, r_bo): income minus spending in each period.
    """
    a = alloc
    w_next = wage_technology(a.e, a.hp, a.hm, params)
    r_by = w * (1 - params.tau) + a.b - a.c1 - a.ph - a.s - a.n * (params.phi + a.e + a.hp + a.hm)
    r_bo = params.R * a.s + params.tau * a.n * w_next - a.c2 - a.n * a.b
    return r_by, r_bo


def dynasty_value(flow_utility, n, params):
    """Stationary dynastic value ``flow / (1 - alpha n)``."""
    alpha_n = params.alpha * n
    if not alpha_n < 1:
        raise DivergentDynasty(f"alpha * n = {alpha_n!r} >= 1")
    return flow_utility / (1 - alpha_n)


def foc_residuals(alloc, prices, w, V_next, params):
    """Full residual system at a candidate interior point.

    ``w`` is the parent's own wage and ``V_next`` the child's lifetime
    utility, both taken as given by the household; the child's wage is
    produced by the technology.  ``r_w`` measures the stationarity gap
    ``w - w_next`` and ``r_V`` the gap in ``V = flow + alpha n V``.
    """
    _check_interior(alloc)
    p, a = params, alloc
    lam, mu = prices.lam, prices.mu
    w_next = wage_technology(a.e, a.hp, a.hm, p)
    q = p.phi + a.e + a.hp + a.hm
    pension = mu * p.tau * w_next
    r_by, r_bo = budget_residuals(a, w, p)
    flow = utility_flow(a, p)
    return ResidualVector(
        r_c1=p.gamma1 / a.c1 - lam,
        r_c2=p.gamma_c / a.c2 - mu,
        r_s=lam - mu * p.R,
        r_ph=p.gamma_ph / a.ph - lam,
        r_e=lam - pension * p.eps / a.e,
        r_hp=lam - pension * p.eta / a.hp,
        r_hm=lam - pension * p.theta / a.hm,
        r_n=p.gamma2 / a.n + p.alpha * V_next + pension - lam * q - mu * a.b,
        r_by=r_by,
        r_bo=r_bo,
        r_w=w - w_next,
        r_V=V_next - (flow + p.alpha * a.n * V_next),
    )


def lagrangian(alloc, prices, w, V_next, params):
    """Household Lagrangian with the child's wage given by the technology."""
    r_by, r_bo = budget_residuals(alloc, w, params)
    return (utility_flow(alloc, params) + params.alpha * alloc.n * V_next
            + prices.lam * r_by + prices.mu * r_bo)


def foc_lagrangian_scale(alloc):
    """Factors mapping Lagrangian partials onto the FOC residuals.

    ``foc_residuals(...).foc()[i] == scale[i] * dL/dx_i`` for the choice
    variables in ``CHOICE_VARIABLES`` order.  The savings and quality entries
    are written as ``lam - ...`` and the quality partials carry a factor n.
    """
    inv_n = -1.0 / alloc.n
    return (1.0, 1.0, -1.0, 1.0, inv_n, inv_n, inv_n, 1.0)


def allocation_ratios(params):
    """Elasticity-implied spending ratios and the mental-health share.

    Returns:
        (e/hp, e/hm, hp/hm, hm / (e + hp + hm))
    """
    p = params
    return p.eps / p.eta, p.eps / p.theta, p.eta / p.theta, p.theta / p.sigma


def steady_state_wage(params):
    """Closed-form stationary wage and per-child quality spending.

    The quality conditions together with ``lam = mu R`` give
    ``e = tau eps w / R`` (likewise hp, hm); substituting into the technology
    and imposing ``w_next = w`` yields the fixed point below.

    Returns:
        (w, e, hp, hm)
    """
    p = params
    sig = p.sigma
    scale = p.tau / p.R
    # eps^eps eta^eta theta^theta in log form to avoid underflow
    log_w = (math.log(p.wbar) + sig * math.log(scale)
             + p.eps * math.log(p.eps) + p.eta * math.log(p.eta)
             + p.theta * math.log(p.theta)) / (1 - sig)
    w = math.exp(log_w)
    base = scale * w
    return w, base * p.eps, base * p.eta, base * p.theta
