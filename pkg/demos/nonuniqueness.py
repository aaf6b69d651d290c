"""Two different terminal utilities can share one value function.

With u = 1.1, d = 0.5, p = 0.2 we get log_a(b) < 0, and for the input
I0(y) = y^log_a(b) both a scaled power and an oscillating perturbation of it
solve the functional equation. Only conditions on the solution's tails
restore uniqueness, and the perturbed solution violates both of them.
"""

import numpy as np

from forwardperf import PeriodParams, check_inada, log_grid, make_nonunique_pair, relative_residual
from forwardperf.funceq import limit_conditions

params = PeriodParams(u=1.1, d=0.5, p=0.2)
pair = make_nonunique_pair(params)
print(f"a = {params.a:.4f}, b = {params.b:.4f}, log_a b = {params.log_a_b:.6f}")
print(f"delta = {pair.delta:.10f}, oscillation amplitude M = {pair.M:.10f}")

ys = log_grid(1e-4, 1e4, 200)
for name, fn in (("principal", pair.principal), ("perturbed", pair.perturbed)):
    res = np.max(relative_residual(fn, pair.initial, params, ys))
    inada = check_inada(fn, 1e-16, 1e16)
    at_zero, at_inf = limit_conditions(fn, params)
    print(f"{name:>9}: max residual {res:.2e}, decreasing/positive/Inada: {inada.ok}, "
          f"tail condition at 0: {at_zero}, at infinity: {at_inf}")

print("the two differ by up to", f"{np.max(np.abs(pair.perturbed(ys) / pair.principal(ys) - 1)):.1%}")
