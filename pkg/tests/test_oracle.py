import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forwardperf import (
    NonConcaveDetected,
    PeriodParams,
    analytic_allocation,
    expected_utility,
    maximize,
    power_utility,
    reconstruct,
    solve,
    verify_pair,
)

PI_OVER_X = 80 / 11  # (delta (p/q)^theta - 1) / (u - 1) for the fixture


@pytest.fixture
def u1_power(fixture_params, u_power2):
    return reconstruct(solve(u_power2.inv_marginal, fixture_params), u_power2, fixture_params)


def test_maximize_fixture(fixture_params, u1_power):
    res = maximize(u1_power, fixture_params, 1.0)
    # frozen oracle output
    assert res.value == pytest.approx(2.0, rel=1e-12)
    assert res.argmax_pi == pytest.approx(PI_OVER_X, rel=1e-7)
    assert res.grid_resolution == 1001
    assert res.refinement_passes > 10


def test_expected_utility_vectorized(fixture_params, u1_power):
    pis = np.array([0.0, 2.0, PI_OVER_X])
    vec = expected_utility(u1_power, fixture_params, 1.0, pis)
    loop = [expected_utility(u1_power, fixture_params, 1.0, float(p)) for p in pis]
    np.testing.assert_allclose(vec, loop, rtol=1e-15)
    assert isinstance(loop[0], float)


def test_analytic_allocation(fixture_params, u_power2, u1_power):
    np.testing.assert_allclose(analytic_allocation(u_power2, u1_power, fixture_params, [0.5, 2.0]),
                               [0.5 * PI_OVER_X, 2.0 * PI_OVER_X], rtol=1e-13)


def test_verify_pair_passes(fixture_params, u_power2, u1_power):
    report = verify_pair(u_power2, u1_power, fixture_params, [0.5, 1.0, 2.0, 5.0])
    assert report.passed
    assert report.max_value_error < 1e-9
    assert report.max_pi_error < 1e-6


def test_verify_pair_negative_control(fixture_params, u_power2):
    report = verify_pair(u_power2, u_power2, fixture_params, [1.0])
    assert not report.passed
    # frozen oracle value of sup E[U0(X)] from x = 1; analytically 2 sqrt(33/25)
    assert report.checks[0].value == pytest.approx(2.297825058615211, rel=1e-9)


def test_zero_premium_gives_zero_allocation(u_power2):
    params = PeriodParams(1.2, 0.9, 1 / 3)
    u1 = reconstruct(solve(u_power2.inv_marginal, params), u_power2, params)
    res = maximize(u1, params, 1.0)
    assert abs(res.argmax_pi) < 1e-6
    assert res.value == pytest.approx(2.0, rel=1e-12)


def test_convex_objective_is_flagged(fixture_params):
    class Convex:
        def value(self, x):
            return np.asarray(x) ** 2

    with pytest.raises(NonConcaveDetected):
        maximize(Convex(), fixture_params, 1.0)


@settings(max_examples=10)
@given(st.floats(0.3, 3.0).filter(lambda t: abs(t - 1.0) > 0.05), st.floats(0.3, 0.9))
def test_oracle_agrees_across_parameters(theta, p):
    params = PeriodParams(1.2, 0.9, p)
    if not params.is_trivial and abs(theta + params.log_a_b) < 1e-3:
        return
    u0 = power_utility(theta)
    u1 = reconstruct(solve(u0.inv_marginal, params), u0, params)
    assert verify_pair(u0, u1, params, [1.0]).passed


def test_objective_at_analytic_allocation(fixture_params, u_power2, u1_power):
    for x in (0.5, 1.0, 2.0):
        pi_star = float(analytic_allocation(u_power2, u1_power, fixture_params, x))
        at_star = expected_utility(u1_power, fixture_params, x, pi_star)
        assert abs(at_star - maximize(u1_power, fixture_params, x).value) < 1e-10


def test_trivial_pair_passes(u_power2):
    params = PeriodParams(1.2, 0.9, 1 / 3)
    report = verify_pair(u_power2, u_power2, params, [0.5, 1.0, 2.0])
    assert report.passed
    assert all(abs(c.argmax_pi) < 1e-6 for c in report.checks)
