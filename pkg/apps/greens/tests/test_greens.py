"""
Tests for kernel inversion, the monotone iteration, the threshold and the
sharpness demo.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from apps.core.exceptions import DegenerateDatumError, DivergenceError, DomainError, PreconditionError
from apps.core.models import Boundary, Datum, ProblemSpec
from apps.core.utils import forcing_F
from apps.greens.models import GreenKernel
from apps.greens.utils import (
    apply_kernel,
    default_grid,
    forcing_profile,
    green_apply,
    green_at,
    monotone_solve,
    nonexistence_threshold,
    sharpness_demo,
)
from apps.transform.utils import radial_residual

LINEAR = Datum.power_law(1.0, 1.0)


def fd_operator(t, z, N):
    """-z'' + (N-4) z' + (2N-4) z with fourth-order central differences."""
    h = t[1] - t[0]
    d1 = (-z[4:] + 8 * z[3:-1] - 8 * z[1:-3] + z[:-4]) / (12 * h)
    d2 = (-z[4:] + 16 * z[3:-1] - 30 * z[2:-2] + 16 * z[1:-3] - z[:-4]) / (12 * h * h)
    return -d2 + (N - 4) * d1 + (2 * N - 4) * z[2:-2]


def test_problem_kernel_roots():
    kernel = GreenKernel.for_problem(5, Boundary.ENTIRE)
    assert (kernel.mu_plus, kernel.mu_minus) == (3.0, -2.0)
    assert kernel.normalization == pytest.approx(1 / 5)


def test_entire_kernel_is_continuous_with_unit_jump():
    kernel = GreenKernel.for_problem(4, Boundary.ENTIRE)
    s, eps = 0.7, 1e-7
    assert kernel.entire(s + eps, s) == pytest.approx(kernel.entire(s - eps, s), rel=1e-6)
    slope_after = (kernel.entire(s + 2 * eps, s) - kernel.entire(s + eps, s)) / eps
    slope_before = (kernel.entire(s - eps, s) - kernel.entire(s - 2 * eps, s)) / eps
    assert slope_after - slope_before == pytest.approx(-1.0, abs=1e-5)


def test_kernel_needs_opposite_roots():
    with pytest.raises(DomainError):
        GreenKernel.for_operator(0.0, -1.0)
    with pytest.raises(DomainError):
        GreenKernel.for_operator(3.0, -2.0)


@pytest.mark.parametrize('N', [4, 5, 6])
def test_constant_input_on_the_line(N):
    t = default_grid(Boundary.ENTIRE)
    z = green_apply(np.full_like(t, 2 * N - 4.0), t, N, Boundary.ENTIRE)
    window = np.abs(t) <= 5
    np.testing.assert_allclose(z[window], 1.0, rtol=0, atol=1e-7)


@pytest.mark.parametrize('boundary', list(Boundary))
def test_zero_input(boundary):
    t = default_grid(boundary)
    assert not np.any(green_apply(np.zeros_like(t), t, 4, boundary))


def test_dirichlet_closed_form():
    t = default_grid(Boundary.DIRICHLET)
    z = green_apply(np.exp(-2 * t) / 2, t, 4, Boundary.DIRICHLET)
    assert z[0] == 0.0
    np.testing.assert_allclose(z, t * np.exp(-2 * t) / 8, rtol=0, atol=1e-9)


def test_navier_row_holds():
    t = default_grid(Boundary.NAVIER)
    z = green_apply(np.exp(-(t - 2) ** 2), t, 5, Boundary.NAVIER)
    h = t[1] - t[0]
    slope = (-25 * z[0] + 48 * z[1] - 36 * z[2] + 16 * z[3] - 3 * z[4]) / (12 * h)
    assert abs(slope - 3 * z[0]) < 1e-7


@pytest.mark.parametrize('boundary, center', [
    (Boundary.DIRICHLET, 5.0),
    (Boundary.NAVIER, 5.0),
    (Boundary.ENTIRE, 0.0),
])
@pytest.mark.parametrize('N', [4, 5])
def test_operator_inverts_the_kernel(N, boundary, center):
    t = default_grid(boundary)
    f = np.exp(-(t - center) ** 2)
    z = green_apply(f, t, N, boundary)
    assert np.max(np.abs(fd_operator(t, z, N) - f[2:-2])) < 1e-6


bumps = st.lists(
    st.tuples(st.floats(min_value=0.0, max_value=5.0), st.floats(min_value=0.5, max_value=20.0)),
    min_size=1,
    max_size=4,
)


@settings(max_examples=30, deadline=None)
@given(bumps, st.sampled_from(list(Boundary)))
def test_nonnegative_input_gives_nonnegative_output(terms, boundary):
    t = default_grid(boundary)
    f = sum(weight * np.exp(-(t - center) ** 2) for weight, center in terms)
    z = green_apply(f, t, 4, boundary)
    assert np.min(z) >= -1e-12 * np.max(f)


def test_divergent_inputs():
    t = default_grid(Boundary.ENTIRE)
    with pytest.raises(DivergenceError):
        green_apply(np.exp(-2 * t) / 2, t, 4, Boundary.ENTIRE)
    t = default_grid(Boundary.DIRICHLET)
    with pytest.raises(DivergenceError):
        green_apply(np.exp(3 * t), t, 4, Boundary.DIRICHLET)


def test_half_line_grid_starts_at_zero():
    with pytest.raises(DomainError):
        green_apply(np.ones(100), np.linspace(1, 10, 100), 4, Boundary.DIRICHLET)


def test_point_evaluation_matches_closed_form():
    kernel = GreenKernel.for_problem(4, Boundary.DIRICHLET)
    value = green_at(lambda s: math.exp(-2 * s) / 2, 1.0, kernel)
    assert value == pytest.approx(math.exp(-2) / 8, rel=1e-8)


def test_point_evaluation_far_along_the_line():
    spec = ProblemSpec(2, 5, datum=Datum.power_law(1.0, 0.0))
    kernel = GreenKernel.for_problem(5, Boundary.ENTIRE)
    value = green_at(lambda s: forcing_F(s, spec), 800.0, kernel)
    assert value == pytest.approx(1 / 6, rel=1e-8)


def test_green_image_per_unit_lambda():
    t = default_grid(Boundary.DIRICHLET)
    one = forcing_profile(ProblemSpec(2, 4, lam=1.0, datum=LINEAR), t)
    other = forcing_profile(ProblemSpec(2, 4, lam=-3.0, datum=LINEAR), t)
    np.testing.assert_allclose(one.z_lambda, other.z_lambda, rtol=1e-12, atol=1e-300)
    assert one.f2(0.5) == pytest.approx(math.exp(-1) / 2)
    assert one.f1(0.5) == one.f2(0.5)


def test_monotone_iteration():
    spec = ProblemSpec(2, 4, lam=-1.0, datum=LINEAR)
    result = monotone_solve(spec)
    assert np.max(result.solution) <= 0.0
    assert np.min(result.solution) < 0.0
    assert result.residual < 1e-8
    assert result.fd_residual < 1e-6
    assert result.history[-1] < 1e-10
    # M = 2 alpha |xi_0| with alpha = 3/2 and |xi_0| = e^{-1} / 16
    assert result.shift == pytest.approx(3 * math.exp(-1) / 16, rel=1e-6)


def test_monotone_iteration_near_zero_lambda():
    result = monotone_solve(ProblemSpec(2, 4, lam=-1e-8, datum=LINEAR))
    assert np.max(np.abs(result.solution)) < 1e-6


def test_monotone_iteration_with_zero_datum():
    result = monotone_solve(ProblemSpec(2, 4, lam=-1.0))
    assert result.iterates == 1
    assert not np.any(result.solution)


def test_monotone_iteration_preconditions():
    with pytest.raises(PreconditionError):
        monotone_solve(ProblemSpec(2, 4, lam=1.0, datum=LINEAR))
    with pytest.raises(PreconditionError):
        monotone_solve(ProblemSpec(2, 4, lam=-1.0, datum=Datum.power_law(-1.0, 1.0)))


def test_monotone_solution_residual_converges_with_grid():
    spec = ProblemSpec(2, 4, lam=-1.0, datum=LINEAR)
    residuals = []
    for nodes in (1001, 2001):
        profile = monotone_solve(spec, t_grid=np.linspace(0.0, 25.0, nodes)).profile(spec)
        residuals.append(radial_residual(profile.u_values, profile.r_grid, spec))
    assert residuals[1] * 4 <= residuals[0]


def test_threshold_closed_form():
    report = nonexistence_threshold(LINEAR, 4, Boundary.DIRICHLET)
    assert report.C1 == pytest.approx(1 / 32, rel=1e-8)
    assert report.C2 == pytest.approx(1 / 18432, rel=1e-6)
    assert report.lambda_bar == pytest.approx(576.0, rel=1e-4)
    assert report.quadrature_error_estimate < 1e-6 * report.lambda_bar


def test_threshold_scaling():
    one = nonexistence_threshold(Datum.power_law(1.0, 1.0), 4, Boundary.DIRICHLET)
    two = nonexistence_threshold(Datum.power_law(2.0, 1.0), 4, Boundary.DIRICHLET)
    assert two.lambda_bar == pytest.approx(one.lambda_bar / 2, rel=1e-10)


def test_threshold_on_zero_datum():
    with pytest.raises(DegenerateDatumError):
        nonexistence_threshold(Datum.zero(), 4, Boundary.DIRICHLET)


def indicator_decay(s):
    return math.exp(-s) if s >= 0 else 0.0


def test_sharpness_with_critical_forcing():
    report = sharpness_demo(4, f2=indicator_decay)
    assert report.violation
    entire = sorted(report.for_boundary(Boundary.ENTIRE), key=lambda row: row.T)
    for row in entire:
        assert row.weighted == pytest.approx(1 / 3 - math.exp(-row.T) / 4, abs=1e-9)
    assert entire[-1].weighted < 1e3


def test_sharpness_with_constant_datum():
    report = sharpness_demo(5, datum=Datum.power_law(1.0, 0.0))
    assert report.violation
    for boundary in Boundary:
        last = max(report.for_boundary(boundary), key=lambda row: row.T)
        assert last.weighted == pytest.approx(math.exp(40) / 6, rel=1e-8)


def test_sharpness_controls():
    fast = sharpness_demo(4, f2=lambda s: math.exp(-3 * s) if s >= 0 else 0.0, control=True)
    assert not fast.violation
    assert all(abs(row.weighted) < 1e-6 for row in fast.rows if row.T == 40.0)
    zero = sharpness_demo(4, f2=lambda s: 0.0, control=True)
    assert all(row.weighted == 0.0 for row in zero.rows)


def test_sharpness_precondition():
    with pytest.raises(PreconditionError):
        sharpness_demo(4, f2=lambda s: math.exp(-3 * s) if s >= 0 else 0.0)
