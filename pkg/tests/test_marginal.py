import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from forwardperf import DomainError, ParseError, PowerMarginal, TabulatedMarginal, check_inada, log_grid
from forwardperf.marginal import MarginalFn, OscillatingPowerMarginal, read_marginal_csv, write_marginal_csv

thetas = st.floats(0.2, 5.0)
ys = st.floats(1e-6, 1e6)


class ShiftedLog(MarginalFn):
    """``I(y) = 1/y + 1/sqrt(y)``: no closed-form inverse, so the generic paths run."""

    def _eval(self, y):
        with np.errstate(divide="ignore"):
            return 1.0 / y + 1.0 / np.sqrt(y)


def test_power_values():
    fn = PowerMarginal(2.0)
    assert fn(0.5) == pytest.approx(4.0)
    np.testing.assert_allclose(fn(np.array([1.0, 10.0])), [1.0, 0.01])
    assert isinstance(fn(2.0), float)


def test_rejects_nonpositive_arguments():
    with pytest.raises(DomainError):
        PowerMarginal(2.0)(0.0)
    with pytest.raises(DomainError):
        PowerMarginal(2.0)(np.array([1.0, -1.0]))
    with pytest.raises(DomainError):
        PowerMarginal(-1.0)


@given(thetas, ys)
def test_power_invert_roundtrip(theta, y):
    fn = PowerMarginal(theta)
    assert fn.invert(fn(y)) == pytest.approx(y, rel=1e-12)


@given(ys)
def test_generic_invert_roundtrip(y):
    fn = ShiftedLog()
    assert fn.invert(fn(y)) == pytest.approx(y, rel=1e-9)


def test_generic_invert_vectorized():
    fn = ShiftedLog()
    y = log_grid(1e-12, 1e12, 97)
    np.testing.assert_allclose(fn.invert(fn(y)), y, rtol=1e-9)


def test_generic_integral_matches_closed_form():
    fn = ShiftedLog()
    lo, hi = np.array([1e-3, 0.5, 2.0]), np.array([5.0, 0.5, 1e4])
    exact = np.log(hi / lo) + 2.0 * (np.sqrt(hi) - np.sqrt(lo))
    np.testing.assert_allclose(fn.integral(lo, hi), exact, rtol=1e-10)
    # reversed limits flip the sign
    assert fn.integral(5.0, 1e-3) == pytest.approx(-exact[0], rel=1e-10)


@given(thetas, ys, ys)
def test_power_integral_matches_quadrature(theta, y0, y1):
    exact = PowerMarginal(theta).integral(y0, y1)
    numeric = MarginalFn.integral(PowerMarginal(theta), y0, y1)
    assert numeric == pytest.approx(exact, rel=1e-9, abs=1e-300)


def test_tabulated_accuracy_at_512_knots():
    fn = PowerMarginal(2.0)
    tab = TabulatedMarginal.from_function(fn, 1e-8, 1e8, 512)
    y = log_grid(1e-8, 1e8, 3001)
    assert np.max(np.abs(tab(y) / fn(y) - 1.0)) < 1e-12  # a power law is linear in log-log
    curved = ShiftedLog()
    tab = TabulatedMarginal.from_function(curved, 1e-8, 1e8, 512)
    assert np.max(np.abs(tab(y) / curved(y) - 1.0)) < 1e-6


def test_tabulated_tails_extrapolate_as_power_laws():
    tab = TabulatedMarginal.from_function(PowerMarginal(1.5), 1e-2, 1e2, 64)
    assert tab.left_tail_exponent == pytest.approx(-1.5, rel=1e-10)
    assert tab.right_tail_exponent == pytest.approx(-1.5, rel=1e-10)
    assert tab(1e6) == pytest.approx(1e-9, rel=1e-8)
    assert tab(1e-6) == pytest.approx(1e9, rel=1e-8)


def test_tabulated_is_strictly_decreasing_on_kinked_data():
    y = np.array([0.1, 0.2, 0.5, 1.0, 1.1, 5.0, 20.0])
    v = np.array([100.0, 50.0, 49.0, 48.9, 2.0, 1.9, 0.1])
    tab = TabulatedMarginal.from_samples(y, v)
    report = check_inada(tab, 0.1, 20.0, n=5000)
    assert report.monotonicity_violations == 0


@pytest.mark.parametrize("y,v", [
    ([1.0, 2.0, 3.0], [3.0, 3.0, 1.0]),
    ([1.0, 3.0, 2.0], [3.0, 2.0, 1.0]),
    ([1.0, 2.0, 3.0], [3.0, 2.0, -1.0]),
    ([1.0], [1.0]),
])
def test_tabulated_rejects_bad_samples(y, v):
    with pytest.raises(DomainError):
        TabulatedMarginal.from_samples(y, v)


def test_csv_roundtrip_is_exact(tmp_path):
    tab = TabulatedMarginal.from_function(ShiftedLog(), 1e-4, 1e4, 50)
    path = tmp_path / "m.csv"
    tab.to_csv(path)
    raw = path.read_bytes()
    assert raw.startswith(b"y,I\n") and b"\r" not in raw
    back = TabulatedMarginal.from_csv(path)
    np.testing.assert_array_equal(np.exp(back.log_y), np.exp(tab.log_y))
    back.to_csv(tmp_path / "m2.csv")
    assert (tmp_path / "m2.csv").read_bytes() == raw


def test_csv_parse_errors_carry_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("y,I\n1.0,2.0\n2.0,abc\n")
    with pytest.raises(ParseError, match=":3:"):
        read_marginal_csv(path)
    path.write_text("x,I\n1.0,2.0\n")
    with pytest.raises(ParseError, match=":1:"):
        read_marginal_csv(path)


def test_write_marginal_csv_full_precision(tmp_path):
    path = tmp_path / "m.csv"
    write_marginal_csv(path, [1 / 3], [math.pi])
    assert path.read_text() == f"y,I\n{1 / 3!r},{math.pi!r}\n"


def test_inada_report():
    ok = check_inada(PowerMarginal(1.0), 1e-8, 1e8)
    assert ok.ok and ok.limits_ok
    shallow = check_inada(PowerMarginal(0.2), 1e-8, 1e8)
    assert not shallow.limits_ok and shallow.monotonicity_violations == 0


def test_oscillating_marginal_antiperiodic_bracket():
    fn = OscillatingPowerMarginal(-0.5, 1.0, 0.3, math.log(20.0))
    y = log_grid(1e-3, 1e3, 11)
    bracket = fn(y) * y**0.5 - 1.0
    shifted = fn(20.0 * y) * (20.0 * y) ** 0.5 - 1.0
    np.testing.assert_allclose(shifted, -bracket, atol=1e-12)


def test_tabulated_200_knots_and_tails():
    fn = PowerMarginal(2.0)
    tab = TabulatedMarginal.from_function(fn, 1e-4, 1e4, 200)
    assert tab(3.0) == pytest.approx(1 / 9, rel=1e-6)
    assert tab.invert(1 / 9) == pytest.approx(3.0, rel=1e-8)
    # one decade past either end the tail law stays within 5%
    assert tab(1e5) == pytest.approx(fn(1e5), rel=0.05)
    assert tab(1e-5) == pytest.approx(fn(1e-5), rel=0.05)


def test_inada_flags_constant_function():
    class Constant(MarginalFn):
        def _eval(self, y):
            return np.ones_like(y)

    report = check_inada(Constant(), 1e-6, 1e6)
    assert report.monotonicity_violations > 0 and not report.ok


def test_power_inada_extremes():
    report = check_inada(PowerMarginal(2.0), 1e-6, 1e6)
    assert report.i_at_min == pytest.approx(1e12)
    assert report.i_at_max == pytest.approx(1e-12)
    assert report.monotonicity_violations == 0
