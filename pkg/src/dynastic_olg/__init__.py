"""Steady state of a dynastic two-period OLG model with PAYG pensions and
three child-quality investments (education, physical and mental health)."""

from .errors import (
    ConfigError,
    DivergentDynasty,
    DomainError,
    InfeasibleEverywhere,
    InvalidGrid,
    ModelError,
    ValidationError,
)
from .model import (
    Allocation,
    ModelParameters,
    ResidualVector,
    ShadowPrices,
    SteadyState,
    allocation_ratios,
    budget_residuals,
    dynasty_value,
    foc_residuals,
    lagrangian,
    steady_state_wage,
    utility_flow,
    wage_technology,
)
from .oracle import OracleOptions, oracle_maximize, oracle_search, truncated_value
from .solver import (
    Polish,
    SolveOutcome,
    SolverOptions,
    Status,
    reduce_system,
    solve_steady_state,
    verify_state,
)
from .statics import SignReport, SweepRow, finite_diff_sign, sweep, table1_report
from .config import ScenarioConfig, parse_config

__version__ = "0.1.0"


def baseline_parameters(**changes):
    """Reference calibration used throughout the tests and demos."""
    p = ModelParameters(gamma1=1.0, gamma_ph=0.5, gamma2=1.0, gamma_c=0.9, alpha=0.4,
                        tau=0.3, phi=0.1, wbar=1.0, eps=0.2, eta=0.2, theta=0.2, R=1.5,
                        bequest=0.0)
    return p.replace(**changes) if changes else p
