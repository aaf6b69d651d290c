"""Brute-force forward check: maximize expected terminal utility over ``pi``.

Nothing here uses the functional equation. Given ``U1`` it solves the ordinary
one-period portfolio problem and reports the value and argmax, which must
reproduce ``U0`` and the analytic allocation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonConcaveDetected
from .market import PeriodParams, admissible_range
from .utility import UtilityFn

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
SCAN_POINTS = 1001
XTOL_REL = 1e-10
EDGE_REL = 1e-12
RTOL = 1e-6


def expected_utility(u1: UtilityFn, params: PeriodParams, x: float, pi):
    """``p U1(x + pi (u-1)) + (1-p) U1(x + pi (d-1))`` for scalar or array ``pi``."""
    pi = np.asarray(pi, dtype=float)
    wealth = np.concatenate([(x + pi * (params.u - 1.0)).ravel(), (x + pi * (params.d - 1.0)).ravel()])
    vals = np.asarray(u1.value(wealth))
    up, down = vals[: pi.size], vals[pi.size:]
    res = (params.p * up + (1.0 - params.p) * down).reshape(pi.shape)
    return float(res) if res.ndim == 0 else res


@dataclass(frozen=True)
class OracleResult:
    value: float
    argmax_pi: float
    grid_resolution: int
    refinement_passes: int


def _check_unimodal(vals: np.ndarray) -> None:
    noise = 1e-9 * max(1.0, float(np.max(np.abs(vals[np.isfinite(vals)]))))
    diffs = np.diff(vals)
    signs = np.sign(np.where(np.abs(diffs) <= noise, 0.0, diffs))
    signs = signs[signs != 0]
    # a concave profile rises then falls: no +1 after the first -1
    if signs.size and np.any(signs[np.argmax(signs < 0):] > 0) and np.any(signs < 0):
        raise NonConcaveDetected("objective in pi is not unimodal on the scan grid")


def maximize(u1: UtilityFn, params: PeriodParams, x: float, *, grid_points: int = SCAN_POINTS,
             xtol_rel: float = XTOL_REL) -> OracleResult:
    rng = admissible_range(params, x)
    edge = EDGE_REL * x
    lo, hi = rng.lo + edge, rng.hi - edge
    grid = np.linspace(lo, hi, grid_points)
    vals = expected_utility(u1, params, x, grid)
    _check_unimodal(vals)
    k = int(np.argmax(vals))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, grid_points - 1)]
    f_a, f_b = vals[max(k - 1, 0)], vals[min(k + 1, grid_points - 1)]

    c1 = b - GOLDEN * (b - a)
    c2 = a + GOLDEN * (b - a)
    f1 = expected_utility(u1, params, x, c1)
    f2 = expected_utility(u1, params, x, c2)
    passes = 0
    while b - a > xtol_rel * x:
        passes += 1
        if f1 >= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - GOLDEN * (b - a)
            f1 = expected_utility(u1, params, x, c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + GOLDEN * (b - a)
            f2 = expected_utility(u1, params, x, c2)
    best = 0.5 * (a + b)
    f_best = expected_utility(u1, params, x, best)
    if f_best < max(f_a, f_b) - 1e-9 * max(1.0, abs(f_best)):
        raise NonConcaveDetected("golden-section bracket lost the maximum")
    return OracleResult(float(f_best), float(best), grid_points, max(passes, 1))


@dataclass(frozen=True)
class OracleCheck:
    x: float
    u0: float
    value: float
    argmax_pi: float
    pi_star: float
    value_error: float
    pi_error: float
    ok: bool


@dataclass(frozen=True)
class PairReport:
    checks: list[OracleCheck]

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def max_value_error(self) -> float:
        return max(c.value_error for c in self.checks)

    @property
    def max_pi_error(self) -> float:
        return max(c.pi_error for c in self.checks)


def analytic_allocation(u0: UtilityFn, u1: UtilityFn, params: PeriodParams, x):
    """``pi*(x) = (I1(rho_u U0'(x)) - I1(rho_d U0'(x))) / (u - d)``."""
    y = np.asarray(u0.marginal(x))
    i1 = u1.inv_marginal
    return (i1(params.rho_u * y) - i1(params.rho_d * y)) / (params.u - params.d)


def verify_pair(u0: UtilityFn, u1: UtilityFn, params: PeriodParams, grid, *,
                rtol: float = RTOL) -> PairReport:
    """Run :func:`maximize` at each wealth in ``grid`` and compare with ``U0``
    and the analytic allocation.

    Value errors are relative to ``max(|U0(x)|, 1)``; allocation errors are
    relative to ``max(|pi*(x)|, x)`` so a zero allocation is still testable.
    """
    checks = []
    for x in np.asarray(grid, dtype=float):
        res = maximize(u1, params, float(x))
        u0x = float(u0.value(float(x)))
        pi_star = float(analytic_allocation(u0, u1, params, float(x)))
        v_err = abs(res.value - u0x) / max(abs(u0x), 1.0)
        p_err = abs(res.argmax_pi - pi_star) / max(abs(pi_star), float(x))
        checks.append(OracleCheck(float(x), u0x, res.value, res.argmax_pi, pi_star, v_err, p_err,
                                  v_err <= rtol and p_err <= rtol))
    return PairReport(checks)
