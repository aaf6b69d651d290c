import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from forwardperf import (
    PeriodParams,
    PowerMarginal,
    ThetaOne,
    TabulatedMarginal,
    UtilityFn,
    duality_gap,
    log_grid,
    log_utility,
    power_utility,
    reconstruct,
    solve,
)
from forwardperf.utility import write_utility_csv

XS = np.array([0.1, 0.5, 1.0, 2.0, 10.0])
SQRT_DELTA = 0.87038827977848919  # sqrt(25/33)
LOG_SHIFT = -0.14834174943487513  # -(0.6 ln 1.8 + 0.4 ln 0.6)


def test_power_utility_values(u_power2):
    np.testing.assert_allclose(u_power2.value(XS), 2.0 * np.sqrt(XS), rtol=1e-14)
    np.testing.assert_allclose(u_power2.marginal(XS), XS**-0.5, rtol=1e-14)
    assert u_power2(4.0) == pytest.approx(4.0)


def test_power_utility_other_theta():
    u = power_utility(0.5)
    np.testing.assert_allclose(u.value(XS), -1.0 / XS, rtol=1e-14)


def test_log_utility(u_log):
    np.testing.assert_allclose(u_log.value(XS), np.log(XS), atol=1e-14)


def test_theta_one_is_refused():
    with pytest.raises(ThetaOne):
        power_utility(1.0)


def test_tabulated_utility_matches_power():
    tab = TabulatedMarginal.from_function(PowerMarginal(2.0), 1e-8, 1e8, 512)
    u = UtilityFn(tab, 1.0, 2.0)
    np.testing.assert_allclose(u.value(XS), 2.0 * np.sqrt(XS), rtol=1e-9)


def test_value_derivative_is_marginal():
    tab = TabulatedMarginal.from_function(PowerMarginal(1.5), 1e-8, 1e8, 1024)
    u = UtilityFn(tab)
    h = 1e-5
    fd = (u.value(XS * (1 + h)) - u.value(XS * (1 - h))) / (2 * h * XS)
    np.testing.assert_allclose(fd, u.marginal(XS), rtol=1e-7)


def test_reconstruct_power_closed_form(fixture_params, u_power2):
    i1 = solve(u_power2.inv_marginal, fixture_params)
    u1 = reconstruct(i1, u_power2, fixture_params)
    np.testing.assert_allclose(u1.value(XS), SQRT_DELTA * u_power2.value(XS), rtol=1e-13)
    assert u1.value(1.0) == pytest.approx(1.7407765595569784, rel=1e-13)


def test_reconstruct_series(fixture_params, u_power2):
    i1 = solve(u_power2.inv_marginal, fixture_params, method="series")
    u1 = reconstruct(i1, u_power2, fixture_params)
    np.testing.assert_allclose(u1.value(XS), SQRT_DELTA * u_power2.value(XS), rtol=1e-10)


def test_reconstruct_log(fixture_params, u_log):
    u1 = reconstruct(solve(u_log.inv_marginal, fixture_params), u_log, fixture_params)
    np.testing.assert_allclose(u1.value(XS), np.log(XS) + LOG_SHIFT, atol=1e-11)


@pytest.mark.parametrize("anchor", [0.05, 0.7, 3.0, 40.0])
def test_anchor_invariance(fixture_params, u_log, anchor):
    i1 = solve(u_log.inv_marginal, fixture_params)
    base = reconstruct(i1, u_log, fixture_params)
    moved = reconstruct(i1, u_log, fixture_params, anchor=anchor)
    np.testing.assert_allclose(moved.value(XS), base.value(XS), atol=1e-10)


def test_duality_gap_vanishes(fixture_params, u_log):
    u1 = reconstruct(solve(u_log.inv_marginal, fixture_params), u_log, fixture_params)
    gap = duality_gap(u_log, u1, fixture_params, log_grid(1e-2, 1e2, 9))
    assert np.max(np.abs(gap)) < 1e-9


def test_duality_gap_detects_wrong_pair(fixture_params, u_power2):
    gap = duality_gap(u_power2, u_power2, fixture_params, 1.0)
    assert abs(gap) > 0.1


@given(st.floats(0.3, 4.0).filter(lambda t: abs(t - 1.0) > 1e-3), st.floats(1e-2, 1e2))
def test_power_value_property(theta, x):
    u = power_utility(theta)
    k = 1.0 - 1.0 / theta
    assert u.value(x) == pytest.approx(x**k / k, rel=1e-12)


@given(st.floats(0.05, 20.0), st.floats(0.05, 20.0))
def test_value_is_increasing(x0, x1):
    u = UtilityFn(TabulatedMarginal.from_function(PowerMarginal(0.7), 1e-6, 1e6, 128))
    lo, hi = sorted((x0, x1))
    if hi - lo > 1e-9 * hi:
        assert u.value(hi) > u.value(lo)


def test_utility_csv(tmp_path, u_power2):
    path = tmp_path / "u.csv"
    u_power2.to_csv(path, [1.0, 4.0])
    assert path.read_text() == "x,U,U_prime\n1.0,2.0,1.0\n4.0,4.0,0.5\n"
    write_utility_csv(tmp_path / "v.csv", [math.e], [1.0], [1 / math.e])
    assert (tmp_path / "v.csv").read_bytes() == f"x,U,U_prime\n{math.e!r},1.0,{1 / math.e!r}\n".encode()
