"""Solver for ``I1(a y) + b I1(y) = (1 + b) I0(c y)``.

Given the inverse marginal ``I0`` at the start of a period and the period's
coefficients, find the inverse marginal ``I1`` at its end. Existence and
uniqueness hinge on the monotonicity of ``Phi0(y) = I0(a c y) - b I0(c y)``
and on where ``Psi0(y) = y**(-log_a b) I0(c y)`` vanishes, both of which are
decided here by sampling.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceDetected, NoConstructiveBranch, PathologicalTheta, WrongSignRegime
from .marginal import (
    DEFAULT_Y_MAX,
    DEFAULT_Y_MIN,
    MarginalFn,
    OscillatingPowerMarginal,
    PowerMarginal,
    log_grid,
)
from .market import PeriodParams

TOL_SERIES = 1e-12
MAX_TERMS = 10_000
CLASSIFY_POINTS = 256
PSI_EPS = 1e-4
PSI_RATE_RATIO = 0.5
PSI_TAIL_DECADES = 4
PATHOLOGICAL_TOL = 1e-9
_TERM_BLOCK = 16


class Branch(enum.Enum):
    SERIES_I = "series-i"
    SERIES_II = "series-ii"
    TRIVIAL_A_EQ_1 = "trivial"
    POWER_CLOSED_FORM = "closed-form"
    UNSOLVABLE = "unsolvable"


class PhiDirection(enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"
    NON_MONOTONE = "non-monotone"


@dataclass(frozen=True)
class ConditionReport:
    """Sampled existence conditions for one ``(I0, params)`` pair.

    ``branch`` is the series branch selected by the sampled sufficient
    conditions, or trivial / unsolvable. ``closed_form`` flags power inputs
    where the explicit scaled power solution is available; ``route`` is what
    :func:`solve` dispatches to.
    """

    phi_direction: PhiDirection
    psi_limit_at_zero: float
    psi_limit_at_infinity: float
    psi_vanishes_at_zero: bool
    psi_vanishes_at_infinity: bool
    branch: Branch
    closed_form: bool = False

    @property
    def route(self) -> Branch:
        if self.closed_form and self.branch in (Branch.SERIES_I, Branch.SERIES_II):
            return Branch.POWER_CLOSED_FORM
        return self.branch


def _check_pathological(fn: MarginalFn, params: PeriodParams) -> None:
    if isinstance(fn, PowerMarginal) and not params.is_trivial:
        if abs(fn.theta + params.log_a_b) < PATHOLOGICAL_TOL:
            raise PathologicalTheta(
                f"theta={fn.theta} equals -log_a(b); the equation has infinitely "
                "many inverse-marginal solutions"
            )


def _direction(values: np.ndarray) -> PhiDirection:
    diffs = np.diff(values)
    if np.all(diffs > 0.0):
        return PhiDirection.INCREASING
    if np.all(diffs < 0.0):
        return PhiDirection.DECREASING
    return PhiDirection.NON_MONOTONE


def _decade_maxima(ys: np.ndarray, vals: np.ndarray) -> np.ndarray:
    decades = np.floor(np.log10(ys / ys[0]) + 1e-9).astype(int)
    return np.array([np.max(vals[decades == k]) for k in np.unique(decades)])


def _vanishes(decade_max: np.ndarray, eps: float, min_ratio: float = PSI_RATE_RATIO) -> bool:
    """Finite stand-in for ``lim Psi0 = 0`` at the end of ``decade_max``.

    ``decade_max`` is ordered toward the limit point. The last few decade
    maxima must strictly decrease, and either the last one is below ``eps`` or
    the per-decade log10 drop is steady: the slowest decade keeps at least
    ``min_ratio`` of the fastest. A steady power-law decay (log utility, or
    ``y**0.04``) goes to zero however slowly; a curve levelling off onto a
    positive plateau shows a shrinking drop and is rejected.
    """
    tail = decade_max[-PSI_TAIL_DECADES:]
    if tail.size < PSI_TAIL_DECADES or not np.all(np.diff(tail) < 0.0) or not tail[-1] >= 0.0:
        return False
    if tail[-1] < eps:
        return True
    if tail[-1] == 0.0:
        return True
    rates = -np.diff(np.log10(tail))
    return bool(rates.min() >= min_ratio * rates.max())


def classify(i0: MarginalFn, params: PeriodParams, *, y_min: float = DEFAULT_Y_MIN,
             y_max: float = DEFAULT_Y_MAX, n: int = CLASSIFY_POINTS,
             psi_eps: float = PSI_EPS) -> ConditionReport:
    if params.is_trivial:
        return ConditionReport(PhiDirection.NON_MONOTONE, math.nan, math.nan, False, False,
                               Branch.TRIVIAL_A_EQ_1, closed_form=False)
    _check_pathological(i0, params)
    a, b, c = params.a, params.b, params.c
    lab = params.log_a_b
    ys = log_grid(y_min, y_max, max(n, 2))
    phi = i0._eval(a * c * ys) - b * i0._eval(c * ys)
    direction = _direction(phi)

    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        psi = np.power(ys, -lab) * i0._eval(c * ys)
    dmax = _decade_maxima(ys, psi)
    at_zero = _vanishes(dmax[::-1], psi_eps)
    at_inf = _vanishes(dmax, psi_eps)

    if direction is PhiDirection.INCREASING and ((a > 1 and at_inf) or (a < 1 and at_zero)):
        branch = Branch.SERIES_I
    elif direction is PhiDirection.DECREASING and ((a > 1 and at_zero) or (a < 1 and at_inf)):
        branch = Branch.SERIES_II
    else:
        branch = Branch.UNSOLVABLE
    closed = isinstance(i0, PowerMarginal) and i0.theta != 1.0
    return ConditionReport(direction, float(dmax[0]), float(dmax[-1]), at_zero, at_inf,
                           branch, closed_form=closed)


class SeriesMarginal(MarginalFn):
    """Lazily evaluated alternating-series solution.

    ``first_branch`` selects
        I1(y) = (1+b)/b * sum_m (-b)^{-m} I0(a^m c y)           (branch i)
    otherwise
        I1(y) = (1+b) * sum_m (-b)^m I0(a^{-(m+1)} c y)         (branch ii)
    Summation stops once the next term is below ``tol`` times the partial sum.
    Term magnitudes must strictly decrease up to that point, otherwise the
    Leibniz error bound is void and :class:`DivergenceDetected` is raised.
    """

    kind = "series"

    def __init__(self, base: MarginalFn, params: PeriodParams, first_branch: bool,
                 tol: float = TOL_SERIES, max_terms: int = MAX_TERMS):
        self.base = base
        self.params = params
        self.first_branch = first_branch
        self.tol = tol
        self.max_terms = max_terms
        a, b, c = params.a, params.b, params.c
        if first_branch:
            self._prefactor = (1.0 + b) / b
            self._arg_ratio, self._arg_start = a, c
            self._weight_ratio = -1.0 / b
        else:
            self._prefactor = 1.0 + b
            self._arg_ratio, self._arg_start = 1.0 / a, c / a
            self._weight_ratio = -b

    @property
    def branch(self) -> Branch:
        return Branch.SERIES_I if self.first_branch else Branch.SERIES_II

    def __repr__(self) -> str:
        return f"SeriesMarginal(branch={self.branch.value}, base={self.base!r}, params={self.params!r})"

    def _eval(self, y):
        return self.evaluate(y)[0]

    def evaluate(self, y):
        """Return ``(value, first_omitted_term, n_terms)`` arrays for ``y``."""
        y = np.asarray(y, dtype=float)
        flat = y.ravel()
        total = np.zeros(flat.shape)
        omitted = np.zeros(flat.shape)
        nterms = np.zeros(flat.shape, dtype=int)
        last = np.full(flat.shape, np.inf)
        active = np.ones(flat.shape, dtype=bool)
        m0 = 0
        log_ratio_arg = math.log(self._arg_ratio)
        log_ratio_w = math.log(abs(self._weight_ratio))
        while active.any():
            if m0 >= self.max_terms:
                raise DivergenceDetected(f"series did not converge within {self.max_terms} terms")
            ms = np.arange(m0, m0 + _TERM_BLOCK)
            idx = np.flatnonzero(active)
            with np.errstate(over="ignore", under="ignore", invalid="ignore"):
                args = flat[idx, None] * self._arg_start * np.exp(ms * log_ratio_arg)[None, :]
                weights = np.exp(ms * log_ratio_w)
                mags = weights[None, :] * self.base._eval(args)
            signs = np.where(ms % 2 == 0, 1.0, -1.0)
            signed = np.cumsum(mags * signs, axis=1)
            partial = total[idx, None] + np.concatenate(
                [np.zeros((idx.size, 1)), signed[:, :-1]], axis=1)
            stop = (mags < self.tol * np.abs(partial)) | (mags == 0.0)
            hit = stop.any(axis=1)
            k = np.where(hit, np.argmax(stop, axis=1), _TERM_BLOCK)
            taken = np.arange(_TERM_BLOCK)[None, :] < k[:, None]
            prev = np.concatenate([last[idx, None], mags[:, :-1]], axis=1)
            if np.any(taken & ~(mags < prev)):
                m_bad = int(ms[np.argmax((taken & ~(mags < prev)).any(axis=0))])
                raise DivergenceDetected(
                    f"term magnitudes stopped decreasing at m={m_bad}; "
                    "the alternating-series bound does not apply"
                )
            rows = np.arange(idx.size)
            # partial[:, k] is the sum of the k terms taken in this block
            full = partial[:, 0] + signed[:, -1]
            total[idx] = np.where(k == _TERM_BLOCK, full, partial[rows, np.minimum(k, _TERM_BLOCK - 1)])
            last[idx] = np.where(k > 0, mags[rows, np.maximum(k - 1, 0)], last[idx])
            omitted[idx] = np.where(hit, mags[rows, np.minimum(k, _TERM_BLOCK - 1)], omitted[idx])
            nterms[idx] += k
            active[idx] = ~hit
            m0 += _TERM_BLOCK
        shape = y.shape
        return (
            (self._prefactor * total).reshape(shape),
            (self._prefactor * omitted).reshape(shape),
            nterms.reshape(shape),
        )


def solve_series_i(i0: MarginalFn, params: PeriodParams, tol: float = TOL_SERIES) -> SeriesMarginal:
    return SeriesMarginal(i0, params, first_branch=True, tol=tol)


def solve_series_ii(i0: MarginalFn, params: PeriodParams, tol: float = TOL_SERIES) -> SeriesMarginal:
    return SeriesMarginal(i0, params, first_branch=False, tol=tol)


def power_delta(theta: float, params: PeriodParams) -> float:
    """Scale of the power solution: ``(1+b) / (c^theta (a^-theta + b))``."""
    a, b, c = params.a, params.b, params.c
    return (1.0 + b) / (c**theta * (a**-theta + b))


def solve_power(theta: float, params: PeriodParams, scale: float = 1.0) -> PowerMarginal:
    """Closed-form solution for ``I0(y) = scale * y**-theta``."""
    i0 = PowerMarginal(theta, scale)
    _check_pathological(i0, params)
    return PowerMarginal(theta, scale * power_delta(theta, params))


def solve(i0: MarginalFn, params: PeriodParams, tol: float = TOL_SERIES, *,
          method: str = "auto", report: ConditionReport | None = None,
          **classify_kw) -> MarginalFn:
    """Solve the period's functional equation for the next inverse marginal.

    ``method="series"`` forces the series route even where a closed form exists.
    """
    if report is None:
        report = classify(i0, params, **classify_kw)
    route = report.route if method == "auto" else report.branch
    if route is Branch.TRIVIAL_A_EQ_1:
        return i0
    if route is Branch.POWER_CLOSED_FORM:
        return solve_power(i0.theta, params, i0.scale)
    if route is Branch.SERIES_I:
        return solve_series_i(i0, params, tol)
    if route is Branch.SERIES_II:
        return solve_series_ii(i0, params, tol)
    raise NoConstructiveBranch(
        f"neither existence condition holds (Phi0 {report.phi_direction.value}, "
        f"Psi0 -> 0 at 0: {report.psi_vanishes_at_zero}, at inf: {report.psi_vanishes_at_infinity})"
    )


def residual(i1: MarginalFn, i0: MarginalFn, params: PeriodParams, y):
    """``I1(a y) + b I1(y) - (1 + b) I0(c y)``."""
    yarr = np.asarray(y, dtype=float)
    a, b, c = params.a, params.b, params.c
    res = i1(a * yarr) + b * i1(yarr) - (1.0 + b) * i0(c * yarr)
    return float(res) if np.ndim(y) == 0 else res


def relative_residual(i1: MarginalFn, i0: MarginalFn, params: PeriodParams, y):
    yarr = np.asarray(y, dtype=float)
    return np.abs(residual(i1, i0, params, yarr)) / ((1.0 + params.b) * i0(params.c * yarr))


def uniqueness_limit(fn: MarginalFn, params: PeriodParams, *, y_min: float = DEFAULT_Y_MIN,
                     y_max: float = DEFAULT_Y_MAX, points_per_decade: int = 64) -> tuple[float, float]:
    """Sup of ``y**(-log_a b) I(y)`` over the lowest and highest grid decades.

    Small components are evidence for the two limit conditions under which the
    equation has at most one solution.
    """
    lab = params.log_a_b
    lo = log_grid(y_min, y_min * 10.0, points_per_decade)
    hi = log_grid(y_max / 10.0, y_max, points_per_decade)
    with np.errstate(over="ignore", under="ignore"):
        low = np.max(np.power(lo, -lab) * fn._eval(lo))
        high = np.max(np.power(hi, -lab) * fn._eval(hi))
    return float(low), float(high)


def limit_conditions(fn: MarginalFn, params: PeriodParams, *, y_min: float = DEFAULT_Y_MIN,
                     y_max: float = DEFAULT_Y_MAX, n: int = CLASSIFY_POINTS,
                     psi_eps: float = PSI_EPS) -> tuple[bool, bool]:
    """Whether ``y**(-log_a b) I(y)`` is judged to vanish at ``0`` and at ``inf``.

    Same decade-maximum test as :func:`classify`. A solution meeting the
    condition for its branch is the only one; failing both leaves room for
    other solutions.
    """
    if params.is_trivial:
        raise WrongSignRegime("limit conditions are undefined when a = 1")
    ys = log_grid(y_min, y_max, max(n, 2))
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        psi = np.power(ys, -params.log_a_b) * fn._eval(ys)
    dmax = _decade_maxima(ys, psi)
    return _vanishes(dmax[::-1], psi_eps), _vanishes(dmax, psi_eps)


@dataclass(frozen=True)
class NonUniquePair:
    principal: PowerMarginal
    perturbed: OscillatingPowerMarginal
    delta: float
    M: float
    initial: PowerMarginal


def make_nonunique_pair(params: PeriodParams) -> NonUniquePair:
    """Two distinct inverse-marginal solutions for ``I0(y) = y**log_a(b)``.

    Requires ``log_a b < 0``. The oscillation amplitude ``M`` is half the
    bound ``delta (-log_a b) / (1 - log_a b)``. For ``|ln a| < pi`` the sine's
    derivative exceeds ``M``; monotonicity of the perturbed function is then
    not implied by the bound and should be checked with :func:`check_inada`.
    """
    if params.is_trivial or not params.log_a_b < 0.0:
        raise WrongSignRegime(f"need log_a(b) < 0, got {params.log_a_b}")
    lab = params.log_a_b
    b, c = params.b, params.c
    delta = (1.0 + b) / (2.0 * b * c**-lab)
    bound = delta * (-lab) / (1.0 - lab)
    amplitude = 0.5 * bound
    return NonUniquePair(
        principal=PowerMarginal(-lab, delta),
        perturbed=OscillatingPowerMarginal(lab, delta, amplitude, math.log(params.a)),
        delta=delta,
        M=amplitude,
        initial=PowerMarginal(-lab),
    )
