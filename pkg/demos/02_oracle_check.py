"""
Brute-force cross-check
=======================

The oracle never touches a first-order condition: it grid-searches the
parent's problem given a truncated continuation value and iterates the
policy until it reproduces itself.  More refinement rounds move it closer to
the solver's answer.
"""

import time

from dynastic_olg import OracleOptions, baseline_parameters, oracle_search, solve_steady_state

params = baseline_parameters()
exact = solve_steady_state(params).state.alloc

for rounds in (2, 4, 6):
    t0 = time.perf_counter()
    result = oracle_search(params, OracleOptions(refine_rounds=rounds))
    worst = max(abs(getattr(result.alloc, k) - getattr(exact, k)) / abs(getattr(exact, k))
                for k in ("c1", "c2", "ph", "s", "n", "e", "hp", "hm"))
    print(f"refine_rounds={rounds}: max rel diff {worst:.2e} "
          f"({result.passes} passes, {time.perf_counter() - t0:.1f} s)")

# with no continuation (horizon 0) children are valued only for the flow
# term, so fertility comes out visibly different
result = oracle_search(params, OracleOptions(horizon=0))
print("horizon=0 fertility:", result.alloc.n, "vs", exact.n)
