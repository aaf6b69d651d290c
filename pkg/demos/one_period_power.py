"""One period, CRRA investor.

Start from U0(x) = 2 sqrt(x) (theta = 2) in a market that moves up 20% or down
10%, with a 60% chance of the up move. We ask which terminal utility U1 makes
U0 the investor's value function, then confirm the answer by brute force.
"""

import numpy as np

from forwardperf import PeriodParams, power_utility, reconstruct, solve, step, verify_pair

params = PeriodParams(u=1.2, d=0.9, p=0.6)
print(f"risk-neutral q = {params.q:.6f}, coefficients a = {params.a:.6f}, b = {params.b:.6f}, c = {params.c:.6f}")

u0 = power_utility(2.0)

# For a power input the equation has a scaled power solution.
i1 = solve(u0.inv_marginal, params)
print(f"closed form: I1(y) = {i1.scale:.12f} * y^-2")

# The alternating series gets to the same function without knowing that.
series = solve(u0.inv_marginal, params, method="series")
ys = np.geomspace(1e-3, 1e3, 7)
print("series / closed form on a few points:", np.round(series(ys) / i1(ys), 14))

u1 = reconstruct(i1, u0, params)
xs = np.array([0.5, 1.0, 2.0, 5.0])
print("U1 / U0 =", u1.value(xs) / u0.value(xs), "(a constant: sqrt of the scale)")

st = step(u0, params, x_n=1.0)
print(f"optimal stock position from x = 1: {st.allocation:.10f}")
print(f"terminal wealth: up {st.wealth_up(1.0):.10f}, down {st.wealth_down(1.0):.10f}")

report = verify_pair(u0, u1, params, xs)
for check in report.checks:
    print(f"x = {check.x:>4}: brute force {check.value:.10f} vs U0 {check.u0:.10f}, "
          f"argmax {check.argmax_pi:.8f} vs {check.pi_star:.8f}")
print("oracle agrees:", report.passed)
