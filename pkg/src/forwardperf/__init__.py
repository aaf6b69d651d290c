"""Predictable forward performance processes in a binomial market.

Typical use::

    from forwardperf import PeriodParams, power_utility, solve, reconstruct

    params = PeriodParams(1.2, 0.9, 0.6)
    u0 = power_utility(2.0)
    u1 = reconstruct(solve(u0.inv_marginal, params), u0, params)
"""

from .config import RunConfig
from .errors import (
    AdmissibilityViolation,
    ArbitrageViolation,
    BracketFailure,
    DivergenceDetected,
    DomainError,
    ForwardPerfError,
    NoConstructiveBranch,
    NonConcaveDetected,
    NonpositiveWealth,
    ParseError,
    PathologicalTheta,
    ProbabilityOutOfRange,
    QuadratureFailure,
    SolverError,
    StepFailure,
    ThetaOne,
    ValidationError,
    WrongSignRegime,
)
from .forward import ForwardStep, InitialUtility, Outcome, Period, Scenario, run, step, wealth_path
from .funceq import (
    Branch,
    ConditionReport,
    SeriesMarginal,
    classify,
    make_nonunique_pair,
    power_delta,
    relative_residual,
    residual,
    solve,
    solve_power,
    uniqueness_limit,
)
from .marginal import (
    MarginalFn,
    OscillatingPowerMarginal,
    PowerMarginal,
    TabulatedMarginal,
    check_inada,
    log_grid,
)
from .market import AdmissibleRange, PeriodParams, admissible_range
from .oracle import analytic_allocation, expected_utility, maximize, verify_pair
from .utility import UtilityFn, duality_gap, log_utility, power_utility, reconstruct

__version__ = "0.1.0"
