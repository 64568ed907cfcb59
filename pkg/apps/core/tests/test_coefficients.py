"""
Tests for the derived coefficients of the autonomous equation.
"""
import pytest
from hypothesis import given, strategies as st

from apps.core.exceptions import DomainError
from apps.core.utils import coefficients


@pytest.mark.parametrize('k, N, gamma, alpha, b1, b0, mu_plus, mu_minus', [
    (2, 4, 1.0, 1.5, 0.0, 4.0, 2.0, -2.0),
    (2, 5, 1.0, 2.0, 1.0, 6.0, 3.0, -2.0),
    (3, 3, 0.0, 1 / 3, 1.0, 2.0, 2.0, -1.0),
])
def test_coefficient_examples(k, N, gamma, alpha, b1, b0, mu_plus, mu_minus):
    co = coefficients(k, N)
    assert co.gamma == gamma
    assert co.alpha == pytest.approx(alpha, rel=1e-15)
    assert co.b1 == b1
    assert co.b0 == b0
    assert co.mu_plus == mu_plus
    assert co.mu_minus == mu_minus


@given(st.integers(min_value=2, max_value=60))
def test_quadratic_roots_are_exact(N):
    """
    For k = 2 the roots are N - 2 and -2, so their gap is N and product -(2N - 4).
    """
    co = coefficients(2, N)
    assert co.mu_plus == N - 2
    assert co.mu_minus == -2
    assert co.mu_plus - co.mu_minus == N
    assert co.mu_plus * co.mu_minus == -(2 * N - 4)
    assert co.alpha == (N - 1) / 2


@given(st.integers(min_value=3, max_value=40), st.data())
def test_roots_have_opposite_signs(N, data):
    k = data.draw(st.integers(min_value=2, max_value=N))
    co = coefficients(k, N)
    assert co.mu_minus < 0 <= co.mu_plus
    for mu in (co.mu_plus, co.mu_minus):
        assert mu ** 2 - co.b1 * mu - co.b0 == pytest.approx(0.0, abs=1e-9 * (1 + co.b0))


def test_cubic_roots():
    co = coefficients(3, 5)
    assert (co.mu_plus, co.mu_minus) == (4.0, -1.0)


@pytest.mark.parametrize('k, N', [(1, 4), (5, 4), (2, 1), (0, 2)])
def test_order_out_of_range(k, N):
    with pytest.raises(DomainError):
        coefficients(k, N)
