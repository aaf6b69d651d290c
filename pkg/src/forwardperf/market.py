"""One-period binomial market with zero interest rate."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ArbitrageViolation, NonpositiveWealth, ProbabilityOutOfRange

# |a - 1| below this routes to the no-risk-premium branch
TRIVIAL_A_TOL = 1e-12


@dataclass(frozen=True)
class PeriodParams:
    """Gross returns ``u > 1 > d > 0`` with physical up-probability ``p``.

    Everything else is derived once at construction: the risk-neutral
    probability ``q``, the functional-equation coefficients ``a, b, c`` and the
    pricing kernel ``rho_u, rho_d``.
    """

    u: float
    d: float
    p: float
    q: float = field(init=False)
    a: float = field(init=False)
    b: float = field(init=False)
    c: float = field(init=False)
    rho_u: float = field(init=False)
    rho_d: float = field(init=False)

    def __post_init__(self) -> None:
        u, d, p = float(self.u), float(self.d), float(self.p)
        if not all(math.isfinite(v) for v in (u, d, p)):
            raise ArbitrageViolation(f"non-finite market parameters u={u}, d={d}, p={p}")
        if not 0.0 < d < 1.0 < u:
            raise ArbitrageViolation(f"need 0 < d < 1 < u, got u={u}, d={d}")
        if not 0.0 < p < 1.0:
            raise ProbabilityOutOfRange(f"need 0 < p < 1, got p={p}")
        q = (1.0 - d) / (u - d)
        derived = {
            "u": u,
            "d": d,
            "p": p,
            "q": q,
            "a": ((1.0 - p) / p) * (q / (1.0 - q)),
            "b": (1.0 - q) / q,
            "c": (1.0 - p) / (1.0 - q),
            "rho_u": q / p,
            "rho_d": (1.0 - q) / (1.0 - p),
        }
        for name, value in derived.items():
            object.__setattr__(self, name, value)

    @property
    def log_a_b(self) -> float:
        """``log_a(b)``; undefined (nan) when ``a == 1``."""
        if self.is_trivial:
            return math.nan
        return math.log(self.b) / math.log(self.a)

    @property
    def is_trivial(self) -> bool:
        return abs(self.a - 1.0) < TRIVIAL_A_TOL

    def admissible_range(self, x: float) -> AdmissibleRange:
        return admissible_range(self, x)


def derive(u: float, d: float, p: float) -> PeriodParams:
    return PeriodParams(u, d, p)


@dataclass(frozen=True)
class AdmissibleRange:
    """Stock positions keeping wealth nonnegative in both states."""

    lo: float
    hi: float
    x: float

    def __contains__(self, pi: float) -> bool:
        return self.lo <= pi <= self.hi


def admissible_range(params: PeriodParams, x: float) -> AdmissibleRange:
    if not x > 0.0 or not math.isfinite(x):
        raise NonpositiveWealth(f"wealth must be positive and finite, got {x}")
    return AdmissibleRange(lo=-x / (params.u - 1.0), hi=x / (1.0 - params.d), x=x)
