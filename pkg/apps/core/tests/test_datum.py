"""
Tests for forcing data and the forcing term F.
"""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from apps.core.exceptions import DomainError, ExtrapolationError
from apps.core.models import Datum, ProblemSpec
from apps.core.utils import forcing_F, load_tabulated_datum


def test_forcing_examples():
    one = Datum.power_law(1.0, 0.0)
    assert forcing_F(0.0, ProblemSpec(2, 4, datum=one)) == pytest.approx(1.0, rel=1e-15)
    linear = ProblemSpec(2, 5, datum=Datum.power_law(1.0, 1.0))
    assert forcing_F(math.log(2.0), linear) == pytest.approx(0.25, rel=1e-14)
    assert forcing_F(3.7, ProblemSpec(2, 5)) == 0.0


@given(
    st.floats(min_value=-0.9, max_value=4.0),
    st.floats(min_value=0.1, max_value=5.0),
    st.integers(min_value=2, max_value=8),
    st.floats(min_value=-5.0, max_value=10.0),
)
def test_power_law_forcing_closed_form(p, c, N, t):
    spec = ProblemSpec(2, N, datum=Datum.power_law(c, p))
    expected = c * math.exp((N - 3 - 1 - (p + 1)) * t) / (p + 1)
    assert forcing_F(t, spec) == pytest.approx(expected, rel=1e-12)


def test_forcing_is_vectorised():
    spec = ProblemSpec(2, 4, datum=Datum.power_law(1.0, 1.0))
    t = np.linspace(0.0, 5.0, 11)
    np.testing.assert_allclose(forcing_F(t, spec), np.exp(-2.0 * t) / 2, rtol=1e-13)


def test_indicator_cumulative():
    datum = Datum.indicator(0.2, 0.5, c=2.0)
    np.testing.assert_allclose(datum.cumulative([0.1, 0.3, 0.9]), [0.0, 0.2, 0.6])


def test_tabulated_cumulative_interpolates_the_integral():
    datum = Datum.tabulated([(0.0, 1.0), (1.0, 1.0), (2.0, 0.0)])
    assert datum.cumulative(0.5) == pytest.approx(0.5)
    assert datum.cumulative(2.0) == pytest.approx(1.5)
    # trailing zero declares compact support
    assert datum.cumulative(10.0) == pytest.approx(1.5)


def test_tabulated_cumulative_is_monotone():
    s = np.linspace(0.0, 1.0, 50)
    datum = Datum.tabulated(zip(s, np.abs(np.sin(7 * s)) + 0.1))
    values = datum.cumulative(np.linspace(0.0, 1.0, 400))
    assert values[0] == 0.0
    assert np.all(np.diff(values) >= 0)


def test_tabulated_extrapolation_is_an_error():
    datum = Datum.tabulated([(0.0, 1.0), (1.0, 2.0)])
    with pytest.raises(ExtrapolationError):
        datum.cumulative(1.5)
    spec = ProblemSpec(2, 4, datum=datum)
    with pytest.raises(ExtrapolationError):
        forcing_F(-1.0, spec)


@pytest.mark.parametrize('samples', [
    [(0.0, 1.0)],
    [(0.1, 1.0), (0.2, 1.0)],
    [(0.0, 1.0), (0.5, 1.0), (0.5, 2.0)],
    [(0.0, 1.0), (1.0, float('nan'))],
])
def test_tabulated_validation(samples):
    with pytest.raises(DomainError):
        Datum.tabulated(samples)


def test_scaled_datum():
    assert Datum.power_law(1.0, 1.0).scaled(2.0).c == 2.0
    scaled = Datum.tabulated([(0.0, 1.0), (1.0, 0.0)]).scaled(3.0)
    assert scaled.cumulative(1.0) == pytest.approx(1.5)


def test_load_tabulated_datum(tmp_path):
    path = tmp_path / 'datum.csv'
    path.write_text('s,g\n0,1\n0.5,1\n1,0\n')
    datum = load_tabulated_datum(path)
    assert datum.s_samples == (0.0, 0.5, 1.0)
    assert datum.cumulative(1.0) == pytest.approx(0.75)


def test_load_tabulated_datum_rejects_header(tmp_path):
    path = tmp_path / 'datum.csv'
    path.write_text('x,y\n0,1\n1,0\n')
    with pytest.raises(DomainError):
        load_tabulated_datum(path)


def test_forcing_far_along_the_half_line():
    constant = ProblemSpec(2, 5, datum=Datum.power_law(1.0, 0.0))
    assert forcing_F(720.0, constant) == 1.0
    assert forcing_F(800.0, constant) == 1.0
    cubic = ProblemSpec(2, 6, datum=Datum.power_law(1.0, 3.0))
    assert forcing_F(200.0, cubic) == pytest.approx(math.exp(-400.0) / 4, rel=1e-12)
    assert forcing_F(400.0, cubic) == 0.0


@pytest.mark.parametrize('datum, slope', [
    (Datum.indicator(0.0, 0.5, c=2.0), 2.0),
    (Datum.indicator(0.1, 0.5), 0.0),
    (Datum.tabulated([(0.0, 3.0), (0.5, 3.0), (1.0, 0.0)]), 3.0),
])
def test_forcing_on_the_linear_stretch_of_the_cumulative(datum, slope):
    # N = 5, k = 2: F(t) = e^t cumulative(e^{-t}) = slope once e^{-t} <= kink
    spec = ProblemSpec(2, 5, datum=datum)
    values = forcing_F(np.array([10.0, 400.0, 800.0]), spec)
    assert np.all(np.isfinite(values))
    np.testing.assert_allclose(values, slope, rtol=1e-12)


def test_weighted_cumulative_matches_the_direct_product():
    datum = Datum.tabulated([(0.0, 1.0), (0.2, 2.0), (1.0, 0.0)])
    t = np.linspace(-2.0, 5.0, 29)
    direct = np.exp(0.5 * t) * datum.cumulative(np.exp(-t))
    np.testing.assert_allclose(datum.weighted_cumulative(t, 0.5), direct, rtol=1e-12)
