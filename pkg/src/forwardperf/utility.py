"""Utility functions rebuilt from their inverse marginals."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ThetaOne
from .marginal import TOL_INVERT, TOL_QUAD, MarginalFn, PowerMarginal, _out, _positive_array
from .market import PeriodParams


@dataclass(frozen=True)
class UtilityFn:
    """Utility pinned by ``U(anchor_x) = anchor_v`` with ``U' = I^{-1}``.

    Values come from the Legendre identity
        int_A^x I^{-1}(xi) dxi = x U'(x) - A U'(A) - int_{U'(A)}^{U'(x)} I(t) dt,
    which trades an inverse inside the integrand for two inversions at the
    endpoints. The remaining integral of ``I`` is done by adaptive quadrature
    (closed form for power inverse marginals).
    """

    inv_marginal: MarginalFn
    anchor_x: float = 1.0
    anchor_v: float = 0.0
    tol_quad: float = TOL_QUAD
    tol_invert: float = TOL_INVERT

    def marginal(self, x):
        return self.inv_marginal.invert(x, self.tol_invert)

    def value(self, x):
        xarr = _positive_array(x, "x")
        y = np.asarray(self.inv_marginal.invert(xarr, self.tol_invert))
        y_anchor = self.inv_marginal.invert(self.anchor_x, self.tol_invert)
        inner = np.asarray(self.inv_marginal.integral(y_anchor, y, self.tol_quad))
        res = self.anchor_v + xarr * y - self.anchor_x * y_anchor - inner
        return _out(res, x)

    __call__ = value

    def to_csv(self, path, xs) -> None:
        xs = np.asarray(xs, dtype=float)
        write_utility_csv(path, xs, self.value(xs), self.marginal(xs))


def power_utility(theta: float, **kw) -> UtilityFn:
    """CRRA utility ``x**(1 - 1/theta) / (1 - 1/theta)``; inverse marginal ``y**-theta``."""
    if theta == 1.0:
        raise ThetaOne("theta = 1 is log utility; use log_utility()")
    inv = PowerMarginal(theta)
    return UtilityFn(inv, 1.0, 1.0 / (1.0 - 1.0 / theta), **kw)


def log_utility(**kw) -> UtilityFn:
    return UtilityFn(PowerMarginal(1.0), 1.0, 0.0, **kw)


def reconstruct(i1: MarginalFn, u0: UtilityFn, params: PeriodParams,
                anchor: float = 1.0) -> UtilityFn:
    """Terminal utility whose inverse marginal is ``i1`` and whose value
    function over one period is ``u0``.

    ``U1(x) = U0(A) + sum_s P(s) int_{I1(rho_s U0'(A))}^x I1^{-1}``, stored
    as its value at ``x = A``. Any anchor ``A > 0`` gives the same function
    when ``i1`` solves the period's functional equation.
    """
    y_anchor = u0.marginal(anchor)
    states = np.array([params.rho_u, params.rho_d]) * y_anchor
    probs = np.array([params.p, 1.0 - params.p])
    wealth = np.asarray(i1(states))
    t = i1.invert(anchor, u0.tol_invert)
    pieces = anchor * t - wealth * states - np.asarray(i1.integral(states, t, u0.tol_quad))
    anchor_v = u0.value(anchor) + float(probs @ pieces)
    return UtilityFn(i1, anchor, anchor_v, u0.tol_quad, u0.tol_invert)


def duality_gap(u0: UtilityFn, u1: UtilityFn, params: PeriodParams, y):
    """``U0(I0(y)) - E[U1(I1(rho y))]``; zero exactly when ``u0`` is the
    one-period value function of ``u1``."""
    yarr = _positive_array(y, "y")
    i0, i1 = u0.inv_marginal, u1.inv_marginal
    lhs = u0.value(i0(yarr))
    up = u1.value(i1(params.rho_u * yarr))
    down = u1.value(i1(params.rho_d * yarr))
    return _out(lhs - (params.p * up + (1.0 - params.p) * down), y)


def write_utility_csv(path, xs, values, marginals) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "U", "U_prime"])
        for row in zip(xs, values, marginals):
            writer.writerow([repr(float(v)) for v in row])
