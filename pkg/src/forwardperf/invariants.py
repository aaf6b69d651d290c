"""Per-step invariant checks for a solved scenario.

Each check returns a :class:`CheckResult` carrying the worst measured error
and the tolerance it was held to, so reports can be tabulated directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .forward import ForwardStep, Outcome, Scenario, step
from .funceq import relative_residual
from .marginal import check_inada, log_grid
from .market import admissible_range
from .oracle import expected_utility, verify_pair
from .utility import UtilityFn

DEFAULT_X_GRID = (0.5, 1.0, 2.0, 5.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    step: int
    error: float
    tolerance: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  step {self.step:>3}  {self.name:<18} err={self.error:.3e}  tol={self.tolerance:.1e}"


def _result(name, index, error, tol) -> CheckResult:
    error = float(error)
    return CheckResult(name, index, error, tol, bool(error <= tol))


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return np.abs(a - b) / np.maximum(np.abs(b), 1.0)


def martingale_error(st: ForwardStep, xs) -> float:
    xs = np.asarray(xs, dtype=float)
    p = st.params.p
    expected = p * st.utility.value(st.wealth_up(xs)) + (1 - p) * st.utility.value(st.wealth_down(xs))
    return float(np.max(_rel(expected, st.prev_utility.value(xs))))


def supermartingale_excess(st: ForwardStep, x: float, n: int = 101) -> tuple[float, float]:
    """Largest ``E[U_{n+1}] - U_n(x)`` over ``n`` admissible allocations, and
    the distance from the best grid allocation to ``pi*(x)`` in grid steps."""
    rng = admissible_range(st.params, x)
    edge = 1e-9 * x
    pis = np.linspace(rng.lo + edge, rng.hi - edge, n)
    vals = expected_utility(st.utility, st.params, x, pis)
    excess = float(np.max(vals - st.prev_utility.value(x)))
    spacing = pis[1] - pis[0]
    offset = abs(pis[int(np.argmax(vals))] - float(st.allocation_at(x))) / spacing
    return excess, offset


def budget_error(st: ForwardStep, xs) -> float:
    xs = np.asarray(xs, dtype=float)
    prm = st.params
    priced = prm.p * prm.rho_u * st.wealth_up(xs) + (1 - prm.p) * prm.rho_d * st.wealth_down(xs)
    return float(np.max(np.abs(priced - xs) / xs))


def first_order_error(st: ForwardStep, xs) -> float:
    """FOC ``p (u-1) U'(X^u) + (1-p)(d-1) U'(X^d) = 0`` relative to the larger term."""
    xs = np.asarray(xs, dtype=float)
    prm = st.params
    up = prm.p * (prm.u - 1) * np.asarray(st.utility.marginal(st.wealth_up(xs)))
    down = (1 - prm.p) * (prm.d - 1) * np.asarray(st.utility.marginal(st.wealth_down(xs)))
    return float(np.max(np.abs(up + down) / np.maximum(np.abs(up), np.abs(down))))


def power_ratio_spread(u_n: UtilityFn, u_0: UtilityFn, xs) -> float:
    """Relative spread of ``U_n(x) / U_0(x)`` over ``xs``; zero for a pure rescaling."""
    ratio = np.asarray(u_n.value(xs)) / np.asarray(u_0.value(xs))
    return float((ratio.max() - ratio.min()) / abs(ratio.mean()))


def predictability_error(st: ForwardStep, config: RunConfig | None = None) -> float:
    """Re-solve with the opposite outcome; everything but realized wealth must match."""
    if st.x is None:
        return 0.0
    other = Outcome.DOWN if st.outcome is Outcome.UP else Outcome.UP
    twin = step(st.prev_utility, st.params, st.x, other, config)
    xs = np.asarray(DEFAULT_X_GRID)
    gaps = [
        abs(twin.allocation - st.allocation) / max(abs(st.allocation), st.x),
        float(np.max(_rel(twin.utility.value(xs), st.utility.value(xs)))),
    ]
    return max(gaps)


def check_step(st: ForwardStep, index: int, *, xs=DEFAULT_X_GRID, oracle: bool = True,
               config: RunConfig | None = None) -> list[CheckResult]:
    xs = np.asarray(xs, dtype=float)
    ys = log_grid(1e-4, 1e4, 200)
    i_prev = st.prev_utility.inv_marginal
    out = [
        _result("residual", index, np.max(relative_residual(st.inv_marginal, i_prev, st.params, ys)), 1e-8),
        _result("martingale", index, martingale_error(st, xs), 1e-7),
        _result("budget", index, budget_error(st, xs), 1e-9),
        _result("first-order", index, first_order_error(st, xs), 1e-6),
    ]
    x0 = st.x if st.x is not None else 1.0
    excess, offset = supermartingale_excess(st, x0)
    out.append(_result("supermartingale", index, max(excess, 0.0), 1e-7))
    out.append(_result("argmax-location", index, offset, 1.0))
    inada = check_inada(st.inv_marginal, 1e-6, 1e6)
    out.append(_result("monotonicity", index, inada.monotonicity_violations + inada.nonpositive, 0))
    out.append(_result("predictability", index, predictability_error(st, config), 1e-12))
    if oracle:
        report = verify_pair(st.prev_utility, st.utility, st.params, [x0])
        out.append(_result("oracle-value", index, report.max_value_error, 1e-6))
        out.append(_result("oracle-argmax", index, report.max_pi_error, 1e-6))
    return out


def run_suite(scenario: Scenario, steps: list[ForwardStep], *, oracle: bool = True,
              config: RunConfig | None = None) -> list[CheckResult]:
    results = []
    for i, st in enumerate(steps):
        results.extend(check_step(st, i, oracle=oracle, config=config))
    if steps:
        wealth = scenario.initial_wealth
        drift = 0.0
        for st in steps:
            if st.realized_wealth is None:
                break
            gross = st.params.u if st.outcome is Outcome.UP else st.params.d
            wealth += st.allocation * (gross - 1.0)
            drift = max(drift, abs(wealth - st.realized_wealth) / abs(st.realized_wealth))
        results.append(_result("wealth-telescoping", len(steps) - 1, drift, 1e-12))
    if scenario.initial_utility.kind == "power" and scenario.initial_utility.theta != 1.0 and steps:
        u0 = steps[0].prev_utility
        spread = max(power_ratio_spread(st.utility, u0, DEFAULT_X_GRID) for st in steps)
        results.append(_result("power-preservation", len(steps) - 1, spread, 1e-8))
    return results
