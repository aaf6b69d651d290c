"""Log utility has no scaled-power shortcut in this code path: it goes through
the series solution, and the answer should be the Kelly portfolio."""

import numpy as np

from forwardperf import PeriodParams, classify, log_utility, reconstruct, solve, step

params = PeriodParams(u=1.2, d=0.9, p=0.6)
u0 = log_utility()

report = classify(u0.inv_marginal, params)
print("Phi0 is", report.phi_direction.value)
print("Psi0 vanishes at 0:", report.psi_vanishes_at_zero, "| at infinity:", report.psi_vanishes_at_infinity)
print("series branch used:", report.route.value)

i1 = solve(u0.inv_marginal, params, report=report)
value, omitted, terms = i1.evaluate(np.array([0.1, 1.0, 10.0]))
print("I1 at 0.1, 1, 10:", value)
print("terms summed:", terms, "first omitted term:", omitted)

u1 = reconstruct(i1, u0, params)
xs = np.array([0.5, 1.0, 4.0])
print("U1(x) - log(x):", u1.value(xs) - np.log(xs), "(a constant shift)")

kelly = params.p / (1 - params.d) - (1 - params.p) / (params.u - 1)
st = step(u0, params, x_n=1.0)
print(f"allocation {st.allocation:.10f} vs Kelly fraction {kelly}")
