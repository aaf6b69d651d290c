"""Inputs that are only known on a grid.

We sample y^-2 at 512 log-spaced points, forget that it was a power law, and
push it through classify, solve and reconstruct. The result is compared with
the exact closed-form answer.
"""

import numpy as np

from forwardperf import (
    PeriodParams,
    PowerMarginal,
    TabulatedMarginal,
    UtilityFn,
    classify,
    power_utility,
    reconstruct,
    solve,
    solve_power,
)

params = PeriodParams(u=1.2, d=0.9, p=0.6)
tab = TabulatedMarginal.from_function(PowerMarginal(2.0), 1e-8, 1e8, 512)
print(f"{tab.knots.shape[0]} knots, tail exponents {tab.left_tail_exponent:.6f} / {tab.right_tail_exponent:.6f}")

report = classify(tab, params)
print("route:", report.route.value, "(no closed form for a table)")

i1 = solve(tab, params, report=report)
exact = solve_power(2.0, params)
ys = np.geomspace(1e-4, 1e4, 9)
print("relative error of I1:", np.abs(i1(ys) / exact(ys) - 1).max())

u0 = UtilityFn(tab, anchor_x=1.0, anchor_v=2.0)
u1 = reconstruct(i1, u0, params)
xs = np.array([0.1, 1.0, 10.0])
target = reconstruct(exact, power_utility(2.0), params)
print("U1 tabulated:", u1.value(xs))
print("U1 exact:    ", target.value(xs))
