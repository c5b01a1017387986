"""
Comparative statics
===================

Sweep the pension rate, then build the full sign report and list the cells
where the observed sign differs from the expected one.
"""

import numpy as np

from dynastic_olg import baseline_parameters, sweep, table1_report

params = baseline_parameters()

print(f"{'tau':>6} {'n':>10} {'w':>10} {'s':>10} {'mh_share':>10}")
for row in sweep(params, "tau", np.linspace(0.1, 0.4, 7)):
    print(f"{row.param_value:6.3f} {row.n:10.5f} {row.w:10.6f} {row.s:10.6f} {row.mh_share:10.6f}")

# the mental-health share only moves with theta
for row in sweep(params, "theta", [0.1, 0.2, 0.3]):
    print(f"theta={row.param_value}: mh_share={row.mh_share:.4f}")

report = table1_report(params)
for cell in report.cells:
    mark = "" if cell.agree else "   <-- differs"
    print(f"{cell.parameter:>6} {cell.outcome:>14}  expected {cell.expected}  "
          f"observed {cell.observed}{mark}")
