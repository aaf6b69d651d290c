import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from forwardperf import ArbitrageViolation, NonpositiveWealth, PeriodParams, ProbabilityOutOfRange
from forwardperf.market import admissible_range, derive

ups = st.floats(1.001, 3.0)
downs = st.floats(0.05, 0.999)
probs = st.floats(0.01, 0.99)


def test_fixture_coefficients(fixture_params):
    prm = fixture_params
    assert prm.q == pytest.approx(1 / 3, rel=1e-15)
    assert prm.a == pytest.approx(1 / 3, rel=1e-15)
    assert prm.b == pytest.approx(2.0, rel=1e-15)
    assert prm.c == pytest.approx(0.6, rel=1e-15)
    assert prm.rho_u == pytest.approx(5 / 9, rel=1e-15)
    assert prm.rho_d == pytest.approx(5 / 3, rel=1e-15)
    assert prm.log_a_b == pytest.approx(-math.log(2) / math.log(3), rel=1e-14)


def test_second_fixture(oscillation_params):
    prm = oscillation_params
    assert prm.q == pytest.approx(5 / 6)
    assert prm.a == pytest.approx(20.0)
    assert prm.b == pytest.approx(0.2)
    assert prm.c == pytest.approx(4.8)
    assert prm.log_a_b == pytest.approx(-0.53724357368, abs=1e-10)


@pytest.mark.parametrize("u,d,p,exc", [
    (1.2, 1.0, 0.6, ArbitrageViolation),
    (1.0, 0.9, 0.6, ArbitrageViolation),
    (0.95, 0.9, 0.6, ArbitrageViolation),
    (1.2, 0.0, 0.6, ArbitrageViolation),
    (1.2, 0.9, 0.0, ProbabilityOutOfRange),
    (1.2, 0.9, 1.0, ProbabilityOutOfRange),
    (math.nan, 0.9, 0.5, ArbitrageViolation),
])
def test_rejects_bad_parameters(u, d, p, exc):
    with pytest.raises(exc):
        PeriodParams(u, d, p)


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        derive(1.2, 1.3, 0.5)


def test_trivial_when_p_equals_q():
    prm = PeriodParams(1.2, 0.9, 1 / 3)
    assert prm.is_trivial
    assert math.isnan(prm.log_a_b)
    assert prm.c == pytest.approx(1.0)


def test_admissible_range(fixture_params):
    rng = admissible_range(fixture_params, 2.0)
    assert rng.lo == pytest.approx(-10.0)
    assert rng.hi == pytest.approx(20.0)
    assert 0.0 in rng and 25.0 not in rng
    assert fixture_params.admissible_range(2.0) == rng
    with pytest.raises(NonpositiveWealth):
        admissible_range(fixture_params, 0.0)


@given(ups, downs, probs)
def test_pricing_kernel_prices_bond_and_stock(u, d, p):
    prm = PeriodParams(u, d, p)
    assert 0.0 < prm.q < 1.0
    # E[rho] = 1 and E[rho * S1] = S0 with S0 = 1
    assert p * prm.rho_u + (1 - p) * prm.rho_d == pytest.approx(1.0, rel=1e-12)
    assert p * prm.rho_u * u + (1 - p) * prm.rho_d * d == pytest.approx(1.0, rel=1e-12)


@given(ups, downs, probs)
def test_coefficient_identities(u, d, p):
    prm = PeriodParams(u, d, p)
    assert prm.a == pytest.approx(prm.rho_u / prm.rho_d, rel=1e-12)
    assert prm.a * prm.b == pytest.approx((1 - p) / p, rel=1e-12)
    assert prm.c == pytest.approx(prm.rho_d ** -1, rel=1e-12)
    assert (prm.a > 1.0) == (p < prm.q)


@given(ups, downs, probs, st.floats(1e-3, 1e3))
def test_admissible_endpoints_zero_out_one_state(u, d, p, x):
    rng = admissible_range(PeriodParams(u, d, p), x)
    assert x + rng.lo * (u - 1) == pytest.approx(0.0, abs=1e-12 * x)
    assert x + rng.hi * (d - 1) == pytest.approx(0.0, abs=1e-12 * x)
