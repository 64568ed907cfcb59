"""
Tests for the change of variables, reconstruction of u and the radial residual.
"""
import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from apps.core.exceptions import DomainError, StencilError, TruncationError
from apps.core.models import Boundary, ProblemSpec
from apps.transform.utils import build_profile, radial_residual, reconstruct_u, w_from_z, z_from_w

ENTIRE_N4 = ProblemSpec(2, 4, boundary=Boundary.ENTIRE)


def homoclinic(t, alpha=1.0):
    x = np.exp(2 * t) / alpha
    return 16 * x / (1 + x) ** 2


def explicit_u(r, alpha=1.0):
    return 8 / (1 + alpha * r ** 2)


def test_change_of_variables_examples():
    t = np.linspace(-3, 3, 61)
    np.testing.assert_allclose(z_from_w(np.exp(t), t, 1.0), 1.0, rtol=1e-15)
    assert not np.any(z_from_w(np.zeros_like(t), t, 1.0))
    w = 16 * np.exp(-t) / (1 + np.exp(-2 * t)) ** 2
    np.testing.assert_allclose(z_from_w(w, t, 1.0), 16 * np.exp(-2 * t) / (1 + np.exp(-2 * t)) ** 2, rtol=1e-14)


@given(
    arrays(np.float64, 20, elements=st.one_of(
        st.just(0.0), st.floats(min_value=1e-6, max_value=1e3), st.floats(min_value=-1e3, max_value=-1e-6),
    )),
    st.floats(min_value=-1.0, max_value=1.0),
)
def test_round_trip_is_identity(w, gamma):
    t = np.linspace(-20, 20, w.size)
    np.testing.assert_allclose(w_from_z(z_from_w(w, t, gamma), t, gamma), w, rtol=1e-14, atol=0)


def test_mismatched_lengths():
    with pytest.raises(DomainError):
        z_from_w(np.ones(3), np.ones(4), 1.0)


@pytest.mark.parametrize('alpha', [1.0, 2.0])
def test_entire_reconstruction_matches_explicit_family(alpha):
    t = np.linspace(-25, 25, 4001)
    profile = build_profile(t, homoclinic(t, alpha), ENTIRE_N4)
    r = np.linspace(0.05, 10, 300)
    assert np.max(np.abs(profile.u_at(r) - explicit_u(r, alpha))) < 1e-6
    assert profile.u_at(0.0) == pytest.approx(8.0, abs=1e-6)


def test_reconstruction_respects_scaling():
    t = np.linspace(-25, 25, 4001)
    one = build_profile(t, homoclinic(t, 1.0), ENTIRE_N4)
    two = build_profile(t, homoclinic(t, 2.0), ENTIRE_N4)
    r = np.linspace(0.05, 5, 200)
    np.testing.assert_allclose(two.u_at(r), one.u_at(np.sqrt(2) * r), atol=1e-6)


@pytest.mark.parametrize('radius', [0.5, 2.0])
def test_rescaled_profile_joins_the_explicit_family(radius):
    t = np.linspace(-25, 25, 4001)
    scaled = build_profile(t, homoclinic(t), ENTIRE_N4).rescaled(radius, 1.0)
    r = np.linspace(0.05, 10, 300)
    assert np.max(np.abs(scaled.u_at(r) - explicit_u(r, radius ** -2))) < 1e-6
    np.testing.assert_allclose(scaled.r_grid, radius * np.exp(-t), rtol=1e-15)
    assert scaled.radius == radius


def test_rescaling_weights_u_by_the_order():
    t = np.linspace(0, 25, 2001)
    profile = build_profile(t, t * np.exp(-2 * t), ProblemSpec(3, 4))
    scaled = profile.rescaled(3.0, 0.0)
    np.testing.assert_allclose(scaled.u_values, 3.0 * profile.u_values, rtol=1e-15)
    np.testing.assert_array_equal(scaled.z_values, profile.z_values)
    assert scaled.rescaled(1.0, 0.0).u_values == pytest.approx(profile.u_values, rel=1e-15)
    with pytest.raises(DomainError):
        profile.rescaled(0.0, 0.0)


def test_anchored_reconstruction():
    t = np.linspace(-25, 25, 4001)
    free = build_profile(t, homoclinic(t), ENTIRE_N4)
    pinned = build_profile(t, homoclinic(t), ENTIRE_N4, anchor=0.0)
    assert pinned.u_at(1.0) == pytest.approx(0.0, abs=1e-10)
    shift = pinned.u_values - free.u_values
    np.testing.assert_allclose(shift, shift[0], rtol=0, atol=1e-12)
    assert shift[0] == pytest.approx(-4.0, abs=1e-6)
    with pytest.raises(DomainError):
        build_profile(t, homoclinic(t), ENTIRE_N4, anchor=30.0)

def test_zero_profile():
    t = np.linspace(0, 10, 101)
    profile = build_profile(t, np.zeros_like(t), ProblemSpec(2, 4))
    assert not np.any(profile.u_values)
    assert not np.any(reconstruct_u(profile, ProblemSpec(2, 4)))
    assert profile.decay_exponent is None


def test_ball_reconstruction_vanishes_at_unit_radius():
    t = np.linspace(0, 10, 2001)
    spec = ProblemSpec(2, 4, boundary=Boundary.NAVIER)
    profile = build_profile(t, np.exp(-3 * t), spec)
    assert profile.u_values[0] == 0.0
    # w = e^{-2t} gives u(r) = (1 - r^3) / 3
    np.testing.assert_allclose(profile.u_values, (1 - profile.r_grid ** 3) / 3, atol=1e-8)


def test_ball_profile_must_start_at_origin():
    t = np.linspace(1, 10, 101)
    with pytest.raises(DomainError):
        build_profile(t, np.exp(-3 * t), ProblemSpec(2, 4))


def test_entire_truncation_is_reported():
    t = np.linspace(-5, 5, 501)
    with pytest.raises(TruncationError):
        build_profile(t, homoclinic(t), ENTIRE_N4)


def test_profile_rows():
    t = np.linspace(0, 5, 11)
    rows = build_profile(t, np.exp(-3 * t), ProblemSpec(2, 4)).to_rows()
    assert len(rows) == 11
    t0, z0, w0, r0, u0 = rows[0]
    assert (t0, z0, w0, r0, u0) == (0.0, 1.0, 1.0, 1.0, 0.0)


@pytest.mark.parametrize('alpha', [1.0, 2.0])
def test_explicit_solution_residual(alpha):
    r = np.linspace(0.1, 5, 2000)
    assert radial_residual(explicit_u(r, alpha), r, ProblemSpec(2, 4)) < 1e-5


def test_constant_has_zero_residual():
    r = np.linspace(0.1, 5, 500)
    assert radial_residual(np.full_like(r, 3.0), r, ProblemSpec(2, 4)) < 1e-12


def test_log_uniform_grid():
    r = np.exp(np.linspace(np.log(0.1), np.log(5), 2000))
    assert radial_residual(explicit_u(r), r, ProblemSpec(2, 4)) < 1e-5
    # decreasing radii as produced by the t grid
    assert radial_residual(explicit_u(r[::-1]), r[::-1], ProblemSpec(2, 4)) < 1e-5


def test_residual_converges_with_grid():
    coarse_r = np.linspace(0.1, 5, 200)
    fine_r = np.linspace(0.1, 5, 400)
    coarse = radial_residual(explicit_u(coarse_r), coarse_r, ProblemSpec(2, 4))
    fine = radial_residual(explicit_u(fine_r), fine_r, ProblemSpec(2, 4))
    assert fine * 4 <= coarse


def test_stencil_errors():
    r = np.linspace(0.1, 1, 6)
    with pytest.raises(StencilError):
        radial_residual(np.ones_like(r), r, ProblemSpec(2, 4))
    r = np.array([0.1, 0.2, 0.4, 0.5, 0.9, 1.3, 1.4, 2.0])
    with pytest.raises(StencilError):
        radial_residual(np.ones_like(r), r, ProblemSpec(2, 4))
