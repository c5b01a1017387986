"""
Solving the baseline steady state
=================================

Solve the stationary equilibrium, print the allocation and check the
closed-form identities it must satisfy.
"""

from dynastic_olg import baseline_parameters, solve_steady_state, verify_state

params = baseline_parameters()
out = solve_steady_state(params)
print("status:", out.status.value)
state = out.state

# the allocation
for name, value in state.alloc.as_dict().items():
    print(f"  {name:>3} = {value:.6g}")
print(f"  wage w = {state.w:.6g}, value V = {state.V:.6g}, alpha*n = {state.alpha_n:.4f}")

# consumption growth over the life cycle is gamma_c/gamma1 * R
a = state.alloc
print("c2/c1 =", a.c2 / a.c1, " expected", params.gamma_c / params.gamma1 * params.R)

# the three child-quality inputs are split in proportion to their elasticities
print("e : hp : hm =", a.e / a.hm, ":", a.hp / a.hm, ": 1")

# all twelve residuals of the full system
print("max |residual| =", verify_state(state, params).max_abs())

# the solver's search path: (n, fertility residual) pairs, last few steps
print(len(out.trace), "evaluations;", out.trace.steps[-3:])
