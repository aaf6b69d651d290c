"""Period-by-period construction of the predictable forward performance process.

At the start of each period the investor knows ``U_n`` and the period's
``(u, d, p)``. :func:`step` solves for ``I_{n+1}``, rebuilds ``U_{n+1}`` and
reads off the optimal allocation; :func:`run` threads realized wealth through
a whole :class:`Scenario`.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import RunConfig
from .errors import AdmissibilityViolation, SolverError, StepFailure, ValidationError
from .funceq import ConditionReport, SeriesMarginal, classify, solve
from .marginal import MarginalFn, TabulatedMarginal
from .market import PeriodParams, admissible_range
from .utility import UtilityFn, log_utility, power_utility, reconstruct


class Outcome(enum.Enum):
    UP = "up"
    DOWN = "down"


@dataclass(frozen=True)
class InitialUtility:
    """``kind`` is ``"power"`` (needs ``theta``), ``"log"`` or ``"tabulated"``.

    A tabulated inverse marginal is read from ``file`` (two-column ``y,I``
    CSV); its utility is pinned by ``U(1) = anchor_value``.
    """

    kind: str
    theta: float | None = None
    file: str | None = None
    anchor_value: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("power", "log", "tabulated"):
            raise ValidationError(f"unknown initial utility kind {self.kind!r}")
        if self.kind == "power" and (self.theta is None or not self.theta > 0.0):
            raise ValidationError("power utility needs a positive theta")
        if self.kind == "tabulated" and not self.file:
            raise ValidationError("tabulated utility needs a file")

    def build(self, config: RunConfig | None = None, base_dir: Path | None = None) -> UtilityFn:
        config = config or RunConfig()
        tols = {"tol_quad": config.tol_quad, "tol_invert": config.tol_invert}
        if self.kind == "power":
            if self.theta == 1.0:
                return log_utility(**tols)
            return power_utility(self.theta, **tols)
        if self.kind == "log":
            return log_utility(**tols)
        path = Path(self.file)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return UtilityFn(TabulatedMarginal.from_csv(path), 1.0, self.anchor_value, **tols)


@dataclass(frozen=True)
class Period:
    u: float
    d: float
    p: float
    realized: Outcome | None = None

    @property
    def params(self) -> PeriodParams:
        return PeriodParams(self.u, self.d, self.p)


@dataclass(frozen=True)
class Scenario:
    initial_utility: InitialUtility
    initial_wealth: float
    periods: tuple[Period, ...] = ()
    base_dir: Path | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "periods", tuple(self.periods))
        if not (math.isfinite(self.initial_wealth) and self.initial_wealth > 0.0):
            raise ValidationError(f"initial_wealth must be positive, got {self.initial_wealth}")
        seen_open = False
        for i, period in enumerate(self.periods):
            try:
                period.params
            except ValidationError as exc:
                raise ValidationError(f"period {i}: {exc}") from exc
            if period.realized is None:
                seen_open = True
            elif seen_open:
                raise ValidationError(
                    f"period {i}: realized outcome after an unrealized period; "
                    "outcomes must form a prefix"
                )

    @property
    def params(self) -> list[PeriodParams]:
        return [p.params for p in self.periods]


@dataclass(frozen=True, eq=False)
class ForwardStep:
    """One solved period.

    ``x`` is the wealth at the start of the period (``None`` once the path is
    unknown); ``allocation`` and ``realized_wealth`` are filled when available.
    """

    params: PeriodParams
    report: ConditionReport
    inv_marginal: MarginalFn
    utility: UtilityFn
    prev_utility: UtilityFn
    x: float | None = None
    allocation: float | None = None
    outcome: Outcome | None = None
    realized_wealth: float | None = None

    def wealth_up(self, x):
        return self.inv_marginal(self.params.rho_u * np.asarray(self.prev_utility.marginal(x)))

    def wealth_down(self, x):
        return self.inv_marginal(self.params.rho_d * np.asarray(self.prev_utility.marginal(x)))

    def allocation_at(self, x):
        return (self.wealth_up(x) - self.wealth_down(x)) / (self.params.u - self.params.d)


def _snapshot(u: UtilityFn, config: RunConfig) -> UtilityFn:
    """Replace a series-backed inverse marginal by a dense tabulation.

    Without this, period ``n`` would evaluate ``n`` nested series. The step
    then solves exactly against the snapshot, which agrees with the series to
    interpolation accuracy (about 1e-9 relative at 2048 knots over 16 decades).
    """
    if not isinstance(u.inv_marginal, SeriesMarginal):
        return u
    tab = u.inv_marginal.tabulate(config.y_min, config.y_max, config.snapshot_points)
    return dataclasses.replace(u, inv_marginal=tab)


def step(u_n: UtilityFn, params: PeriodParams, x_n: float | None = None,
         outcome: Outcome | str | None = None, config: RunConfig | None = None) -> ForwardStep:
    config = config or RunConfig()
    if outcome is not None:
        outcome = Outcome(outcome)
    u_n = _snapshot(u_n, config)
    report = classify(u_n.inv_marginal, params, y_min=config.y_min, y_max=config.y_max)
    i_next = solve(u_n.inv_marginal, params, config.tol_series, report=report)
    u_next = reconstruct(i_next, u_n, params)
    result = ForwardStep(params, report, i_next, u_next, u_n)
    if x_n is None:
        return result
    rng = admissible_range(params, x_n)
    pi = float(result.allocation_at(x_n))
    slack = 1e-9 * x_n
    if not rng.lo - slack <= pi <= rng.hi + slack:
        raise AdmissibilityViolation(
            f"allocation {pi} outside admissible range [{rng.lo}, {rng.hi}] at x={x_n}"
        )
    realized = None
    if outcome is not None:
        gross = params.u if outcome is Outcome.UP else params.d
        realized = x_n + pi * (gross - 1.0)
    return dataclasses.replace(result, x=x_n, allocation=pi, outcome=outcome,
                               realized_wealth=realized)


def run(scenario: Scenario, config: RunConfig | None = None) -> list[ForwardStep]:
    config = config or RunConfig()
    u = scenario.initial_utility.build(config, scenario.base_dir)
    x: float | None = scenario.initial_wealth
    steps = []
    for i, period in enumerate(scenario.periods):
        try:
            st = step(u, period.params, x, period.realized, config)
        except SolverError as exc:
            raise StepFailure(i, exc) from exc
        steps.append(st)
        u, x = st.utility, st.realized_wealth
    return steps


def wealth_path(scenario: Scenario, steps: list[ForwardStep]) -> list[float]:
    """``X_0, X_1*, ...`` over the realized prefix."""
    path = [scenario.initial_wealth]
    for st in steps:
        if st.realized_wealth is None:
            break
        path.append(st.realized_wealth)
    return path
