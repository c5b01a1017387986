import math

import pytest

from dynastic_olg import (
    Allocation,
    DomainError,
    InfeasibleEverywhere,
    OracleOptions,
    baseline_parameters,
    dynasty_value,
    oracle_search,
    truncated_value,
    utility_flow,
)
from dynastic_olg.oracle import DIMS, best_response

FIELDS = ("c1", "c2", "ph", "s", "n", "e", "hp", "hm")


def flow_alloc(params, flow, n):
    """Allocation whose flow utility is ``flow`` (through c1 alone)."""
    c1 = math.exp(flow / params.gamma1)
    return Allocation(c1=c1, c2=1.0, ph=1.0, s=0.0, n=n, e=1.0, hp=1.0, hm=1.0)


def max_rel(a, b):
    return max(abs(getattr(a, k) - getattr(b, k)) / abs(getattr(b, k)) for k in FIELDS)


@pytest.fixture(scope="module")
def oracle_result(baseline):
    return oracle_search(baseline, OracleOptions(horizon=30, grid_points=15, refine_rounds=6))


class TestTruncatedValue:
    def test_half_weight(self):
        p = baseline_parameters(alpha=0.5, gamma1=1.0)
        a = flow_alloc(p, 2.0, 1.0)
        assert utility_flow(a, p) == pytest.approx(2.0, rel=1e-15)
        v = truncated_value(a, p, 30)
        assert abs(v - 4.0) <= 2.0 ** -30 * 4.0

    def test_zero_horizon(self, baseline):
        a = flow_alloc(baseline, -3.0, 0.7)
        assert truncated_value(a, baseline, 0) == utility_flow(a, baseline)

    def test_point_nine(self):
        p = baseline_parameters(alpha=0.9, gamma1=1.0)
        a = flow_alloc(p, 1.5, 1.0)
        flow = utility_flow(a, p)
        assert truncated_value(a, p, 30) == pytest.approx(flow * (1 - 0.9 ** 31) / 0.1, rel=1e-13)

    @pytest.mark.parametrize("T", [0, 1, 5, 30, 80])
    def test_truncation_bound(self, baseline, T):
        a = flow_alloc(baseline, -2.5, 1.2)
        flow = utility_flow(a, baseline)
        an = baseline.alpha * a.n
        gap = abs(truncated_value(a, baseline, T) - dynasty_value(flow, a.n, baseline))
        assert gap <= an ** (T + 1) * abs(flow) / (1 - an) * (1 + 1e-12) + 1e-14

    def test_domain(self, baseline):
        with pytest.raises(DomainError):
            truncated_value(flow_alloc(baseline, 1.0, 1.0).replace(c2=0.0), baseline, 3)


class TestBestResponse:
    def test_infeasible_box(self, baseline):
        opts = OracleOptions(grid_points=3, refine_rounds=1)
        box = {d: (1.0, 2.0) for d in DIMS}
        with pytest.raises(InfeasibleEverywhere):
            best_response(baseline, 0.01, 0.0, box, opts)

    def test_options_validated(self):
        for bad in (dict(horizon=-1), dict(grid_points=2), dict(refine_rounds=0)):
            with pytest.raises(ValueError):
                OracleOptions(**bad)


@pytest.mark.slow
class TestOracleAgainstSolver:
    def test_agreement(self, oracle_result, baseline_state):
        assert max_rel(oracle_result.alloc, baseline_state.alloc) <= 1e-3

    def test_solver_value_not_worse(self, baseline, oracle_result, baseline_state):
        # both evaluated as the parent's objective against the solver's dynasty
        p = baseline
        st = baseline_state
        v_cont = truncated_value(st.alloc, p, 29)
        own = truncated_value(st.alloc, p, 0) + p.alpha * st.alloc.n * v_cont
        o = oracle_result.alloc
        theirs = truncated_value(o, p, 0) + p.alpha * o.n * v_cont
        assert own >= theirs - 1e-6 * abs(theirs)
        assert truncated_value(st.alloc, p, 30) >= oracle_result.value - 1e-6 * abs(oracle_result.value)

    def test_quality_ratios(self, baseline, oracle_result):
        a = oracle_result.alloc
        assert a.e / a.hp == pytest.approx(baseline.eps / baseline.eta, rel=1e-4)
        assert a.e / a.hm == pytest.approx(baseline.eps / baseline.theta, rel=1e-4)

    def test_refinement_monotone(self, baseline, baseline_state, oracle_result):
        dists = []
        for rounds in (2, 4):
            r = oracle_search(baseline, OracleOptions(refine_rounds=rounds))
            dists.append(max_rel(r.alloc, baseline_state.alloc))
        dists.append(max_rel(oracle_result.alloc, baseline_state.alloc))
        dists.append(max_rel(oracle_search(baseline, OracleOptions(refine_rounds=8)).alloc,
                             baseline_state.alloc))
        assert all(b <= a for a, b in zip(dists, dists[1:])), dists

    def test_deterministic(self, baseline, oracle_result):
        assert oracle_search(baseline, OracleOptions()).alloc == oracle_result.alloc

    def test_zero_horizon_disagrees(self, baseline, baseline_state):
        r = oracle_search(baseline, OracleOptions(horizon=0))
        assert max_rel(r.alloc, baseline_state.alloc) > 1e-3

    def test_coarse_grid_terminates(self, baseline):
        r = oracle_search(baseline, OracleOptions(grid_points=3, refine_rounds=1))
        assert r.alloc.is_interior()
