import os

import pytest
from hypothesis import HealthCheck, settings

from forwardperf import PeriodParams, log_utility, power_utility

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def fixture_params():
    """u=1.2, d=0.9, p=0.6: q=1/3, a=1/3, b=2, c=0.6."""
    return PeriodParams(1.2, 0.9, 0.6)


@pytest.fixture
def oscillation_params():
    """u=1.1, d=0.5, p=0.2: a=20, b=0.2, log_a b < 0."""
    return PeriodParams(1.1, 0.5, 0.2)


@pytest.fixture
def u_power2():
    return power_utility(2.0)


@pytest.fixture
def u_log():
    return log_utility()


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record one summary line per acceptance criterion.

    Call ``acceptance(number, passed, detail)`` once the criterion's
    measurements are in; the line is echoed to stdout and repeated in the
    terminal summary so a plain ``pytest -v`` log shows it.
    """

    def record(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
