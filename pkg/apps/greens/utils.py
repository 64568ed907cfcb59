"""
Green-kernel inversion of the linear part of the z-equation, the monotone
iteration for lambda < 0, the large-lambda threshold and the sharpness demo.
"""
import logging
import math

import numpy as np
from scipy.integrate import quad, simpson
from scipy.signal import lfilter

from apps.core.constants import (
    MONOTONE_MAX_ITER,
    MONOTONE_SLACK,
    MONOTONE_TOL,
    NEGLIGIBLE_TAIL,
)
from apps.core.exceptions import (
    DegenerateDatumError,
    DivergenceError,
    DomainError,
    IterationOrderError,
    MaxIterationsError,
    NumericError,
    PreconditionError,
)
from apps.core.models import Boundary, ProblemSpec
from apps.core.utils import assumption_check, forcing_F
from apps.core.validators import validate_aligned, validate_grid, validate_nonlinear_order

from .models import ForcingProfile, GreenKernel, MonotoneResult, SharpnessReport, SharpnessRow, ThresholdReport

logger = logging.getLogger(__name__)

GRID_T = 25.0
GRID_NODES = 4001
TAIL_FRACTION = 0.1
ROOT_MARGIN = 1e-6
QUAD_REL = 1e-10
QUAD_LIMIT = 200
SHARPNESS_TIMES = (10.0, 20.0, 40.0)


def default_grid(boundary, T=GRID_T, nodes=GRID_NODES):
    """Uniform grid on [0, T] for the half-line problems and [-T, T] for the entire one."""
    if Boundary(boundary) is not Boundary.ENTIRE:
        return np.linspace(0.0, T, nodes)
    t = np.linspace(-T, T, nodes)
    if nodes % 2:
        t[nodes // 2] = 0.0
    return t


def _sample(f, t):
    values = f(t) if callable(f) else f
    values = np.array(np.broadcast_to(np.asarray(values, dtype=float), t.shape))
    validate_aligned(t, values)
    if not np.all(np.isfinite(values)):
        raise NumericError('Green input has non-finite samples.')
    return values


def _interval_integrals(f, h, mu):
    """
    Integrals of e^{mu (t_{i+1} - s)} f(s) over each cell [t_i, t_{i+1}] from
    the cubic through four neighbouring nodes. The end cells extrapolate the
    missing neighbour with a quartic.
    """
    e = math.exp(mu * h)
    inner = -e * e * f[:-3] + 13 * e * f[1:-2] + 13 * f[2:-1] - f[3:] / e
    first = 8 * e * f[0] + 23 * f[1] - 11 * f[2] / e + 5 * f[3] / e ** 2 - f[4] / e ** 3
    last = -e ** 4 * f[-5] + 5 * e ** 3 * f[-4] - 11 * e ** 2 * f[-3] + 23 * e * f[-2] + 8 * f[-1]
    return (h / 24) * np.concatenate([[first], inner, [last]])


def _decaying_convolution(f, h, mu):
    """int_{t_0}^{t_i} e^{mu (t_i - s)} f(s) ds at every node, for mu <= 0."""
    out = np.zeros(f.size)
    out[1:] = lfilter([1.0], [1.0, -math.exp(mu * h)], _interval_integrals(f, h, mu))
    return out


def _tail_exponent(t, f):
    if np.any(f == 0) or np.any(np.sign(f) != np.sign(f[0])):
        return None
    slope, _ = np.polyfit(t, np.log(np.abs(f)), 1)
    return float(slope)


def _check_tails(kernel, t, f):
    scale = max(1.0, float(np.max(np.abs(f))))
    width = max(4, int(TAIL_FRACTION * t.size))
    if abs(f[-1]) > NEGLIGIBLE_TAIL * scale:
        kappa = _tail_exponent(t[-width:], f[-width:])
        if kappa is not None and kappa >= kernel.mu_plus - ROOT_MARGIN:
            raise DivergenceError(f'Input grows like e^({kappa:.4g} t) at +inf; the kernel needs less than {kernel.mu_plus:g}.')
    if kernel.boundary is Boundary.ENTIRE and abs(f[0]) > NEGLIGIBLE_TAIL * scale:
        kappa = _tail_exponent(t[:width], f[:width])
        if kappa is not None and kappa <= kernel.mu_minus + ROOT_MARGIN:
            raise DivergenceError(f'Input behaves like e^({kappa:.4g} t) at -inf; the kernel needs more than {kernel.mu_minus:g}.')


def apply_kernel(kernel, f, t_grid):
    """
    z = L^{-1} f on a uniform grid. Half-line grids start at t = 0 and the
    boundary row holds exactly at the first node.
    """
    t = validate_grid(t_grid, min_points=5, uniform=True)
    f = _sample(f, t)
    if kernel.boundary.is_half_line and t[0] != 0.0:
        raise DomainError(f'Half-line grids must start at t = 0, got {t[0]:g}.', code='grid_start')
    _check_tails(kernel, t, f)

    h = float(t[1] - t[0])
    forward = _decaying_convolution(f, h, kernel.mu_minus)
    backward = _decaying_convolution(f[::-1], h, -kernel.mu_plus)[::-1]
    z = kernel.normalization * (forward + backward)
    if kernel.boundary.is_half_line:
        z = z + kernel.correction(z[0]) * np.exp(kernel.mu_minus * t)
    return z


def green_apply(f, t_grid, N, boundary, k=2):
    return apply_kernel(GreenKernel.for_problem(N, boundary, k), f, t_grid)


def green_at(f, t, kernel, weight=0.0):
    """
    e^{weight t} (L^{-1} f)(t) at one point by adaptive quadrature of the
    callable ``f``; the weight is folded into the integrands.
    """
    half_line = kernel.boundary.is_half_line
    if half_line and t < 0:
        raise DomainError(f'Half-line kernels are defined for t >= 0, got {t:g}.', code='kernel_point')
    opts = {'epsabs': 0.0, 'epsrel': QUAD_REL, 'limit': QUAD_LIMIT}

    def behind(u):
        return math.exp(weight * t + kernel.mu_minus * u) * f(t - u)

    def ahead(u):
        return math.exp(weight * t - kernel.mu_plus * u) * f(t + u)

    total = quad(ahead, 0.0, np.inf, **opts)[0]
    if t > 0:
        total += quad(behind, 0.0, t, **opts)[0]
    if not half_line:
        total += quad(behind, max(t, 0.0), np.inf, **opts)[0]
    value = kernel.normalization * total

    if half_line:
        z_half0 = kernel.normalization * quad(lambda s: math.exp(-kernel.mu_plus * s) * f(s), 0.0, np.inf, **opts)[0]
        value += kernel.correction(z_half0) * math.exp((kernel.mu_minus + weight) * t)
    return value


def forcing_profile(spec, t_grid=None, z_values=None):
    """
    f2 = lambda F, f1 = alpha z^k + f2 and their Green images on the grid.
    """
    t = default_grid(spec.boundary) if t_grid is None else validate_grid(t_grid, min_points=5, uniform=True)
    kernel = GreenKernel.for_problem(spec.N, spec.boundary, spec.k)
    alpha, k, lam = spec.coefficients.alpha, spec.k, spec.lam

    def f2(s):
        return lam * forcing_F(s, spec)

    if z_values is None:
        def f1(s):
            return f2(s)
    else:
        z_values = np.asarray(z_values, dtype=float)
        validate_aligned(t, z_values)

        def f1(s):
            return alpha * np.interp(s, t, z_values) ** k + f2(s)

    if lam == 0.0:
        z1 = np.zeros_like(t)
        z_lambda = apply_kernel(kernel, forcing_F(t, spec), t)
    else:
        z1 = apply_kernel(kernel, f2(t), t)
        z_lambda = z1 / lam
    return ForcingProfile(f2, f1, t, z1, z_lambda)


def _shift(xi0, spec):
    # smallest M making h(xi) + M xi nondecreasing on [min xi0, 0]
    if spec.k % 2:
        return 0.0
    co = spec.coefficients
    return spec.k * co.alpha * float(np.max(np.abs(xi0))) ** (spec.k - 1)


def _check_order(xi0, prev, nxt, n):
    if np.any(nxt < prev - MONOTONE_SLACK) or np.any(nxt < xi0 - MONOTONE_SLACK):
        worst = float(np.max(prev - nxt))
        raise IterationOrderError(f'Iterate {n} decreased by {worst:.3g} somewhere on the grid.')
    if np.any(nxt > MONOTONE_SLACK):
        raise IterationOrderError(f'Iterate {n} rose above 0 by {float(np.max(nxt)):.3g}.')


def fd_residual(t, z, spec):
    """
    Sup-norm of -z'' + b1 z' + b0 z - alpha z^k - lambda F at interior nodes,
    with fourth-order central differences.
    """
    h = float(t[1] - t[0])
    co = spec.coefficients
    d1 = (-z[4:] + 8 * z[3:-1] - 8 * z[1:-3] + z[:-4]) / (12 * h)
    d2 = (-z[4:] + 16 * z[3:-1] - 30 * z[2:-2] + 16 * z[1:-3] - z[:-4]) / (12 * h * h)
    inner = z[2:-2]
    residual = -d2 + co.b1 * d1 + co.b0 * inner - co.alpha * inner ** spec.k
    if spec.lam != 0.0:
        residual -= spec.lam * forcing_F(t[2:-2], spec)
    return float(np.max(np.abs(residual)))


def monotone_solve(spec, t_grid=None, tol=MONOTONE_TOL, max_iter=MONOTONE_MAX_ITER):
    """
    Monotone iteration for lambda < 0 with the shifted operator L + M.

    Starts from xi_0 = L^{-1}[lambda F] and solves
    (L + M) xi_{n+1} = alpha xi_n^k + M xi_n + lambda F until the sup-norm
    step drops below ``tol``. Every iterate is checked against
    xi_0 <= xi_n <= xi_{n+1} <= 0 within MONOTONE_SLACK.
    """
    if spec.lam >= 0:
        raise PreconditionError(f'Monotone iteration needs lambda < 0, got {spec.lam}.')
    validate_nonlinear_order(spec.k)
    if not spec.datum.is_nonnegative:
        raise PreconditionError('Monotone iteration needs a nonnegative datum.')
    report = assumption_check(spec.datum, spec.N, spec.boundary, spec.k)
    if report.inconclusive:
        logger.warning(f"Decay assumption inconclusive for monotone iteration: {report.witness}")
    elif not report.holds:
        raise PreconditionError(f'Decay assumption fails: {report.witness}')

    t = default_grid(spec.boundary) if t_grid is None else validate_grid(t_grid, min_points=5, uniform=True)
    co = spec.coefficients
    base = GreenKernel.for_problem(spec.N, spec.boundary, spec.k)
    forcing = spec.lam * forcing_F(t, spec)
    xi0 = apply_kernel(base, forcing, t)
    shift = _shift(xi0, spec)
    kernel = base if shift == 0 else GreenKernel.for_operator(co.b1, co.b0 + shift, spec.boundary, spec.navier_slope)

    xi = xi0
    history = []
    for n in range(1, max_iter + 1):
        nxt = apply_kernel(kernel, co.alpha * xi ** spec.k + shift * xi + forcing, t)
        _check_order(xi0, xi, nxt, n)
        step = float(np.max(np.abs(nxt - xi)))
        history.append(step)
        xi = nxt
        logger.debug(f"Monotone iterate {n}: step {step:.3e}")
        if step < tol:
            break
    else:
        raise MaxIterationsError(f'Monotone iteration did not reach {tol:g} in {max_iter} iterations (last step {history[-1]:.3g}).')

    fixed_point = float(np.max(np.abs(xi - apply_kernel(base, co.alpha * xi ** spec.k + forcing, t))))
    result = MonotoneResult(t, xi, len(history), tuple(history), fixed_point, fd_residual(t, xi, spec), shift)
    logger.info(f"Monotone iteration converged in {result.iterates} iterates, residual {fixed_point:.3e}")
    return result


def _weighted_integrals(t, values, kernel, half_line):
    plus = t >= 0
    total = simpson(np.exp(-kernel.mu_plus * t[plus]) * values[plus], x=t[plus])
    if not half_line:
        minus = t <= 0
        total += simpson(np.exp(-kernel.mu_minus * t[minus]) * values[minus], x=t[minus])
    return kernel.normalization * total


def _threshold_constants(spec, kernel, nodes, T):
    t = default_grid(spec.boundary, T, nodes)
    F = forcing_F(t, spec)
    z_lam = apply_kernel(kernel, F, t)
    half_line = spec.boundary.is_half_line
    C1 = _weighted_integrals(t, F, kernel, half_line)
    C2 = spec.coefficients.alpha * _weighted_integrals(t, z_lam ** 2, kernel, half_line)
    return C1, C2


def nonexistence_threshold(datum, N, boundary, nodes=GRID_NODES, T=GRID_T):
    """
    Sufficient bound lambda_bar = C1 / C2 above which no solution exists for
    k = 2. Half-line problems keep only the t >= 0 integrals. The error
    estimate compares the grid with ``nodes`` nodes to the one with 2 nodes - 1.
    """
    boundary = Boundary(boundary)
    if datum.is_zero:
        raise DegenerateDatumError('Zero datum: both threshold constants vanish.')
    if not datum.is_nonnegative:
        raise PreconditionError('The threshold needs a nonnegative datum.')
    if nodes % 2 == 0:
        nodes += 1
    report = assumption_check(datum, N, boundary)
    if report.inconclusive:
        logger.warning(f"Decay assumption inconclusive for the threshold: {report.witness}")
    elif not report.holds:
        raise PreconditionError(f'Decay assumption fails: {report.witness}')

    spec = ProblemSpec(2, N, lam=1.0, boundary=boundary, datum=datum)
    kernel = GreenKernel.for_problem(N, boundary)
    coarse = _threshold_constants(spec, kernel, nodes, T)
    C1, C2 = _threshold_constants(spec, kernel, 2 * nodes - 1, T)
    if C2 <= 0:
        raise DegenerateDatumError(f'Threshold constant C2 = {C2:.3g} is not positive.')
    lambda_bar = C1 / C2
    error = abs(lambda_bar - coarse[0] / coarse[1])
    logger.info(f"Threshold N={N} {boundary.value}: lambda_bar={lambda_bar:.10g} (+/- {error:.2g})")
    return ThresholdReport(float(C1), float(C2), float(lambda_bar), float(error), 2 * nodes - 1)


def _datum_forcing(datum, N, lam):
    spec = ProblemSpec(2, N, lam=lam, datum=datum)

    def f2(s):
        return lam * forcing_F(s, spec) if s >= 0 else 0.0
    return f2


def sharpness_demo(N, datum=None, lam=1.0, f2=None, times=SHARPNESS_TIMES, control=False):
    """
    Weighted values W(T) = e^T (L^{-1} f2)(T) for every boundary kind, with
    f2 taken on t >= 0. A forcing with e^t f2(t) >= 1 for t > 0 drives W
    away from 0; ``control=True`` skips that precondition.
    """
    if f2 is None:
        if datum is None:
            raise DomainError('Pass a datum or an explicit f2.', code='sharpness_input')
        f2 = _datum_forcing(datum, N, lam)

    if not control:
        samples = np.linspace(0.0, max(times), 401)[1:]
        weighted = np.array([math.exp(s) * f2(s) for s in samples])
        if np.min(weighted) < 1 - 1e-9:
            raise PreconditionError(
                f'e^t f2(t) drops to {np.min(weighted):.3g} on (0, {max(times):g}]; '
                'the forcing does not violate the decay assumption (use control=True).'
            )

    rows = []
    for boundary in Boundary:
        kernel = GreenKernel.for_problem(N, boundary)
        for T in times:
            rows.append(SharpnessRow(boundary, float(T), float(green_at(f2, T, kernel, weight=1.0))))
    report = SharpnessReport(N, tuple(rows), control)
    logger.info(f"Sharpness N={N}: violation={report.violation}")
    return report
