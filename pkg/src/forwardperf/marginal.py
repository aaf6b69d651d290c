"""Inverse marginal functions.

An inverse marginal ``I = (U')^{-1}`` is positive, strictly decreasing on
``(0, inf)``, blows up at ``0+`` and vanishes at ``inf``. Every representation
here evaluates on numpy arrays of any shape; scalars in give floats out.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.integrate import quad_vec
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .errors import BracketFailure, DomainError, ParseError, QuadratureFailure

TOL_INVERT = 1e-10
TOL_QUAD = 1e-10
EPS_INADA = 1e-6
DEFAULT_KNOTS = 512
DEFAULT_Y_MIN = 1e-8
DEFAULT_Y_MAX = 1e8
# about 1e6 integrand evaluations with the 21-point Gauss-Kronrod rule
QUAD_INTERVAL_LIMIT = 10**6 // 21
# log-space limit for bracket growth; exp(700) is near the float ceiling
_S_LIMIT = 700.0


def log_grid(y_min: float, y_max: float, n: int) -> np.ndarray:
    if not 0.0 < y_min < y_max:
        raise DomainError(f"need 0 < y_min < y_max, got {y_min}, {y_max}")
    return np.logspace(math.log10(y_min), math.log10(y_max), n)


def _positive_array(y, name="y") -> np.ndarray:
    arr = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError(f"{name} must be positive and finite")
    return arr


def _out(arr: np.ndarray, like):
    return float(arr) if np.ndim(like) == 0 else arr


class MarginalFn:
    """Base class. Subclasses implement ``_eval`` on float arrays.

    ``_eval`` must tolerate ``0`` and ``inf`` arguments (mapping them to the
    Inada limits) because series solutions push arguments off any finite range.
    """

    kind = "abstract"

    def _eval(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, y):
        arr = _positive_array(y)
        return _out(self._eval(arr), y)

    def eval(self, y):
        return self(y)

    def invert(self, z, tol: float = TOL_INVERT):
        """Solve ``I(y) = z`` for ``y``.

        Works in log-log coordinates where every inverse marginal is a
        decreasing function of ``s = ln y``. The bracket grows from the seed
        ``y = 1`` with doubling log-steps, then Illinois false position
        (bisection where the secant is unusable) shrinks it until
        ``|I(y) - z| <= tol * z``.
        """
        zarr = _positive_array(z, "z")
        target = np.log(zarr).ravel()
        s = _invert_log(lambda s: self._log_eval(s), target, tol)
        return _out(np.exp(s).reshape(zarr.shape), z)

    def _log_eval(self, s: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", over="ignore", under="ignore"):
            return np.log(self._eval(np.exp(s)))

    def integral(self, y0, y1, tol: float = TOL_QUAD):
        """``int_{y0}^{y1} I(t) dt`` elementwise, by adaptive quadrature.

        The substitution ``t = y0 (y1/y0)^tau`` maps every pair onto
        ``tau in [0, 1]`` so one vector-valued adaptive Gauss-Kronrod run
        handles a whole batch. Each component is pre-scaled to order one so
        the shared error norm acts as a per-component relative tolerance.
        """
        lo = _positive_array(y0, "y0")
        hi = _positive_array(y1, "y1")
        lo, hi = np.broadcast_arrays(lo, hi)
        shape = lo.shape
        lo, hi = lo.ravel(), hi.ravel()
        log_r = np.log(hi) - np.log(lo)
        scale = np.abs(log_r) * (lo * self._eval(lo) + hi * self._eval(hi))
        scale = np.where(scale > 0.0, scale, 1.0)

        def integrand(tau: float) -> np.ndarray:
            t = lo * np.exp(tau * log_r)
            return self._eval(t) * t * log_r / scale

        if not np.any(log_r):
            res = np.zeros_like(lo)
        else:
            res, err, info = quad_vec(
                integrand, 0.0, 1.0, epsrel=tol, epsabs=0.0, norm="max",
                limit=QUAD_INTERVAL_LIMIT, full_output=True,
            )
            if not info.success:
                raise QuadratureFailure(
                    f"quadrature did not reach rtol={tol} (err={err:.3g}, "
                    f"intervals={info.intervals.shape[0]})"
                )
            res = res * scale
        return _out(res.reshape(shape), np.broadcast(y0, y1))

    def sample(self, y_min: float = DEFAULT_Y_MIN, y_max: float = DEFAULT_Y_MAX,
               n: int = DEFAULT_KNOTS) -> tuple[np.ndarray, np.ndarray]:
        ys = log_grid(y_min, y_max, n)
        return ys, self._eval(ys)

    def tabulate(self, y_min: float = DEFAULT_Y_MIN, y_max: float = DEFAULT_Y_MAX,
                 n: int = DEFAULT_KNOTS) -> TabulatedMarginal:
        return TabulatedMarginal.from_samples(*self.sample(y_min, y_max, n))


def _invert_log(f, target: np.ndarray, tol: float, max_iter: int = 300) -> np.ndarray:
    """Vectorized root of the decreasing map ``f(s) = target``."""
    n = target.size
    g = lambda s: f(s) - target  # noqa: E731
    g0 = g(np.zeros(n))
    lo, hi = np.zeros(n), np.zeros(n)
    g_lo, g_hi = g0.copy(), g0.copy()
    done = np.abs(g0) <= tol
    # f is decreasing, so g0 > 0 puts the root to the right of the seed
    up = ~done & (g0 > 0)
    down = ~done & (g0 < 0)
    step = 1.0
    while up.any() or down.any():
        if step > _S_LIMIT:
            raise BracketFailure(
                "no bracket for inverse within y in [exp(-700), exp(700)]; "
                "input is probably not an inverse marginal"
            )
        trial = np.where(up, step, -step)
        gt = g(np.where(up | down, trial, 0.0))
        up_hit, up_more = up & (gt <= 0), up & (gt > 0)
        down_hit, down_more = down & (gt >= 0), down & (gt < 0)
        hi, g_hi = np.where(up_hit | down_more, trial, hi), np.where(up_hit | down_more, gt, g_hi)
        lo, g_lo = np.where(down_hit | up_more, trial, lo), np.where(down_hit | up_more, gt, g_lo)
        up &= ~up_hit
        down &= ~down_hit
        step *= 2.0

    s = np.zeros(n)
    side = np.zeros(n, dtype=int)
    active = ~done
    for _ in range(max_iter):
        if not active.any():
            break
        finite = np.isfinite(g_lo) & np.isfinite(g_hi) & (g_lo != g_hi)
        with np.errstate(invalid="ignore", divide="ignore"):
            falsi = lo - g_lo * (hi - lo) / (g_hi - g_lo)
        mid = 0.5 * (lo + hi)
        cand = np.where(finite, falsi, mid)
        inside = (cand > lo) & (cand < hi)
        cand = np.where(inside, cand, mid)
        gc = g(np.where(active, cand, 0.0))
        s = np.where(active, cand, s)
        converged = active & ((np.abs(gc) <= tol) | (hi - lo <= 1e-15 * np.maximum(1.0, np.abs(cand))))
        go_right = active & (gc > 0)
        go_left = active & (gc <= 0)
        # Illinois: halve the stale endpoint's value when the same side repeats
        g_hi = np.where(go_right & (side == 1), 0.5 * g_hi, g_hi)
        g_lo = np.where(go_left & (side == -1), 0.5 * g_lo, g_lo)
        lo = np.where(go_right, cand, lo)
        g_lo = np.where(go_right, gc, g_lo)
        hi = np.where(go_left, cand, hi)
        g_hi = np.where(go_left, gc, g_hi)
        side = np.where(go_right, 1, np.where(go_left, -1, side))
        active &= ~converged
    if active.any():
        raise BracketFailure("inverse search did not converge")
    return s


@dataclass(frozen=True)
class PowerMarginal(MarginalFn):
    """``I(y) = scale * y**(-theta)``; ``theta = 1`` is log utility."""

    theta: float
    scale: float = 1.0
    kind = "power"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.theta) and self.theta > 0.0):
            raise DomainError(f"theta must be positive, got {self.theta}")
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise DomainError(f"scale must be positive, got {self.scale}")

    def _eval(self, y):
        with np.errstate(divide="ignore", over="ignore"):
            return self.scale * np.power(y, -self.theta)

    def invert(self, z, tol: float = TOL_INVERT):
        zarr = _positive_array(z, "z")
        return _out(np.power(zarr / self.scale, -1.0 / self.theta), z)

    def integral(self, y0, y1, tol: float = TOL_QUAD):
        lo = _positive_array(y0, "y0")
        hi = _positive_array(y1, "y1")
        if self.theta == 1.0:
            res = self.scale * (np.log(hi) - np.log(lo))
        else:
            k = 1.0 - self.theta
            res = self.scale * (np.power(hi, k) - np.power(lo, k)) / k
        return _out(np.asarray(res), np.broadcast(y0, y1))


@dataclass(frozen=True, eq=False)
class TabulatedMarginal(MarginalFn):
    """Knots in log-log space with monotone cubic Hermite interpolation.

    Knot slopes come from a not-a-knot cubic spline, clipped by the Hyman
    filter (same sign as the neighbouring secants, at most three times their
    magnitude) so the interpolant stays strictly decreasing while keeping
    fourth-order accuracy where the data are smooth.

    Off the grid the function continues as a power law whose exponent is the
    least-squares slope of the last ``tail_fit`` knots at each end.
    """

    log_y: np.ndarray
    log_i: np.ndarray
    left_tail_exponent: float
    right_tail_exponent: float
    kind = "tabulated"

    @classmethod
    def from_samples(cls, y, values, tail_fit: int = 5) -> TabulatedMarginal:
        y = _positive_array(y)
        values = np.asarray(values, dtype=float)
        if y.ndim != 1 or y.shape != values.shape or y.size < 2:
            raise DomainError("need two matching 1-d arrays with at least two knots")
        if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
            raise DomainError("tabulated values must be positive and finite")
        if np.any(np.diff(y) <= 0.0):
            raise DomainError("knots must be strictly increasing in y")
        if np.any(np.diff(values) >= 0.0):
            raise DomainError("tabulated values must be strictly decreasing")
        log_y, log_i = np.log(y), np.log(values)
        k = min(tail_fit, y.size)
        left = _anchored_slope(log_y[:k], log_i[:k], 0)
        right = _anchored_slope(log_y[-k:], log_i[-k:], -1)
        return cls(log_y, log_i, left, right)

    @classmethod
    def from_function(cls, fn: MarginalFn, y_min: float = DEFAULT_Y_MIN,
                      y_max: float = DEFAULT_Y_MAX, n: int = DEFAULT_KNOTS) -> TabulatedMarginal:
        return fn.tabulate(y_min, y_max, n)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_interp", _monotone_hermite(self.log_y, self.log_i))

    @property
    def knots(self) -> np.ndarray:
        return np.column_stack([self.log_y, self.log_i])

    def _eval(self, y):
        with np.errstate(divide="ignore"):
            s = np.log(y)
        s0, s1 = self.log_y[0], self.log_y[-1]
        inner = np.clip(s, s0, s1)
        out = self._interp(inner)
        out = np.where(s < s0, self.log_i[0] + self.left_tail_exponent * (s - s0), out)
        out = np.where(s > s1, self.log_i[-1] + self.right_tail_exponent * (s - s1), out)
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(out)

    def to_csv(self, path) -> None:
        write_marginal_csv(path, np.exp(self.log_y), np.exp(self.log_i))

    @classmethod
    def from_csv(cls, path) -> TabulatedMarginal:
        y, values = read_marginal_csv(path)
        return cls.from_samples(y, values)


def _monotone_hermite(s: np.ndarray, v: np.ndarray) -> CubicHermiteSpline:
    secants = np.diff(v) / np.diff(s)
    slopes = CubicSpline(s, v).derivative()(s) if s.size > 2 else np.full(s.size, secants[0])
    bound = np.full(s.size, np.inf)
    bound[:-1] = np.minimum(bound[:-1], 3.0 * np.abs(secants))
    bound[1:] = np.minimum(bound[1:], 3.0 * np.abs(secants))
    slopes = np.where(slopes < 0.0, np.maximum(slopes, -bound), 0.0)
    return CubicHermiteSpline(s, v, slopes, extrapolate=False)


def _anchored_slope(s: np.ndarray, v: np.ndarray, anchor: int) -> float:
    ds, dv = s - s[anchor], v - v[anchor]
    slope = float(np.dot(ds, dv) / np.dot(ds, ds))
    if not slope < 0.0:
        raise DomainError("tail slope must be negative for an inverse marginal")
    return slope


@dataclass(frozen=True)
class OscillatingPowerMarginal(MarginalFn):
    """``I(y) = y**exponent * (delta + amplitude * sin(pi ln(y) / log_period))``.

    With ``log_period = ln a`` the bracket is anti-periodic under ``y -> a y``,
    which is what makes it a second solution next to ``delta * y**exponent``.
    """

    exponent: float
    delta: float
    amplitude: float
    log_period: float
    kind = "oscillating"

    def theta(self, z):
        return self.amplitude * np.sin(np.pi * np.asarray(z) / self.log_period)

    def _eval(self, y):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            z = np.log(y)
            osc = np.where(np.isfinite(z), self.theta(np.where(np.isfinite(z), z, 0.0)), 0.0)
            return np.power(y, self.exponent) * (self.delta + osc)


@dataclass(frozen=True)
class InadaReport:
    y_min: float
    y_max: float
    i_at_min: float
    i_at_max: float
    monotonicity_violations: int
    nonpositive: int
    eps: float = EPS_INADA

    @property
    def limits_ok(self) -> bool:
        return self.i_at_max < self.eps and self.i_at_min > 1.0 / self.eps

    @property
    def ok(self) -> bool:
        return self.limits_ok and self.monotonicity_violations == 0 and self.nonpositive == 0


def check_inada(fn: MarginalFn, y_min: float, y_max: float, n: int = 1000,
                eps: float = EPS_INADA) -> InadaReport:
    """Sampled diagnostics for membership in the inverse-marginal class."""
    ys = log_grid(y_min, y_max, n)
    vals = fn._eval(ys)
    return InadaReport(
        y_min=y_min,
        y_max=y_max,
        i_at_min=float(vals[0]),
        i_at_max=float(vals[-1]),
        monotonicity_violations=int(np.count_nonzero(np.diff(vals) >= 0.0)),
        nonpositive=int(np.count_nonzero(~(vals > 0.0))),
        eps=eps,
    )


def write_marginal_csv(path, y, values) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["y", "I"])
        for a, b in zip(np.asarray(y, dtype=float), np.asarray(values, dtype=float)):
            writer.writerow([repr(float(a)), repr(float(b))])


def read_marginal_csv(path) -> tuple[np.ndarray, np.ndarray]:
    path = Path(path)
    ys, vals = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["y", "I"]:
            raise ParseError(f"{path}:1: expected header 'y,I'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ParseError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                ys.append(float(row[0]))
                vals.append(float(row[1]))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
    return np.array(ys), np.array(vals)
