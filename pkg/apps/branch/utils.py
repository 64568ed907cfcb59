"""
Damped Newton on the collocated forced problem, natural-parameter
continuation of the small-lambda branch and the closed-form kernel check at
the N = 4 homoclinic.
"""
import logging
import math

import numpy as np
from numpy.polynomial import Polynomial
from scipy.sparse.linalg import norm as sparse_norm
from scipy.sparse.linalg import splu

from apps.core.constants import (
    MIN_GRID_NODES,
    MIN_LAMBDA_STEP,
    NEAR_SINGULAR,
    NEWTON_DAMPING_HALVINGS,
    NEWTON_MAX_ITER,
    NEWTON_RESIDUAL_TOL,
    NEWTON_STEP_TOL,
)
from apps.core.exceptions import DomainError, FoldSignal, KHessianError, NoConvergence
from apps.core.models import Boundary
from apps.core.utils import coefficients, forcing_F
from apps.core.validators import validate_aligned, validate_grid, validate_nonlinear_order
from apps.greens.utils import GRID_NODES, GRID_T, default_grid, nonexistence_threshold

from .models import BranchPoint, ContinuationResult, FoldReport, KernelCheckReport, LinearizedOperator

logger = logging.getLogger(__name__)

SINGULAR_VALUE_ITERATIONS = 50
KERNEL_CHECK_RANGE = (-8.0, 8.0)
KERNEL_CHECK_NODES = 2001


def discrete_residual(z, t, spec, forcing=None):
    """
    Collocated residual of -z'' + b1 z' + b0 z - alpha z^k - lambda F with the
    boundary rows of ``LinearizedOperator``.
    """
    co = spec.coefficients
    h = float(t[1] - t[0])
    inner = z[1:-1]
    r = np.empty_like(z)
    r[1:-1] = (
        -(z[2:] - 2 * inner + z[:-2]) / h ** 2
        + co.b1 * (z[2:] - z[:-2]) / (2 * h)
        + co.b0 * inner
        - co.alpha * inner ** spec.k
    )
    if spec.lam != 0.0:
        F = forcing_F(t[1:-1], spec) if forcing is None else forcing
        r[1:-1] -= spec.lam * F

    if spec.boundary is Boundary.DIRICHLET:
        r[0] = z[0]
    else:
        slope = spec.navier_slope if spec.boundary is Boundary.NAVIER else co.mu_plus
        r[0] = (-3 * z[0] + 4 * z[1] - z[2]) / (2 * h) - slope * z[0]
    r[-1] = (3 * z[-1] - 4 * z[-2] + z[-3]) / (2 * h) - co.mu_minus * z[-1]
    return r


def jacobian(z, t, spec):
    return LinearizedOperator.at(z, t, spec).matrix()


def _factorize(J):
    try:
        return splu(J)
    except RuntimeError as e:
        raise FoldSignal(f'Jacobian factorisation failed: {e}') from e


def smallest_singular_value(J, lu=None, iterations=SINGULAR_VALUE_ITERATIONS):
    """
    Inverse power iteration on J^T J through the LU factors of J.
    """
    lu = _factorize(J) if lu is None else lu
    v = np.random.default_rng(0).standard_normal(J.shape[0])
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(iterations):
        w = lu.solve(lu.solve(v, trans='T'))
        estimate = float(np.linalg.norm(w))
        if not math.isfinite(estimate) or estimate == 0.0:
            return 0.0
        v = w / estimate
    return 1.0 / math.sqrt(estimate)


def _conditioning(J, lu):
    sigma = smallest_singular_value(J, lu)
    if sigma == 0.0:
        return math.inf
    return float(sparse_norm(J, np.inf)) / sigma


def branch_grid(boundary, T=GRID_T, nodes=GRID_NODES):
    if nodes < MIN_GRID_NODES:
        raise DomainError(f'Collocation needs at least {MIN_GRID_NODES} nodes, got {nodes}.', code='grid_size')
    if T <= 0:
        raise DomainError(f'Truncation T must be positive, got {T}.', code='truncation')
    return default_grid(Boundary(boundary), T, nodes)


def newton_solve(spec, lam=None, guess=None, T=GRID_T, nodes=GRID_NODES, t_grid=None):
    """
    Damped Newton for the collocated problem at ``lam`` (``spec.lam`` when
    omitted), starting from ``guess`` (zero when omitted).

    Each step is halved up to NEWTON_DAMPING_HALVINGS times until the residual
    drops. Raises FoldSignal when the Jacobian cannot be factorised and
    NoConvergence when damping or the iteration limit runs out.
    """
    validate_nonlinear_order(spec.k)
    if lam is not None:
        spec = spec.with_lambda(lam)
    if t_grid is None:
        t = branch_grid(spec.boundary, T, nodes)
    else:
        t = validate_grid(t_grid, min_points=MIN_GRID_NODES, uniform=True)
    if spec.boundary.is_half_line and t[0] != 0.0:
        raise DomainError(f'Half-line grids must start at t=0, got t={t[0]}.', code='grid_origin')

    z = np.zeros_like(t) if guess is None else np.array(guess, dtype=float)
    validate_aligned(t, z)
    forcing = forcing_F(t[1:-1], spec) if spec.lam != 0.0 else None
    r = discrete_residual(z, t, spec, forcing)
    r_norm = float(np.max(np.abs(r)))

    for iteration in range(1, NEWTON_MAX_ITER + 1):
        J = jacobian(z, t, spec)
        lu = _factorize(J)
        dz = lu.solve(-r)
        if not np.all(np.isfinite(dz)):
            raise FoldSignal(f'Newton step is not finite at lambda={spec.lam:g}.')

        step = 1.0
        for _ in range(NEWTON_DAMPING_HALVINGS + 1):
            trial = z + step * dz
            r_trial = discrete_residual(trial, t, spec, forcing)
            trial_norm = float(np.max(np.abs(r_trial)))
            if trial_norm < r_norm or trial_norm <= NEWTON_RESIDUAL_TOL:
                break
            step /= 2
        else:
            raise NoConvergence(
                f'Damping exhausted at lambda={spec.lam:g}, iteration {iteration} (residual {r_norm:.3g}).'
            )

        z, r, r_norm = trial, r_trial, trial_norm
        step_norm = step * float(np.max(np.abs(dz)))
        logger.debug(f"Newton {iteration} at lambda={spec.lam:g}: step {step_norm:.3e}, residual {r_norm:.3e}")
        if step_norm <= NEWTON_STEP_TOL * max(1.0, float(np.max(np.abs(z)))) or r_norm <= NEWTON_RESIDUAL_TOL:
            break
    else:
        raise NoConvergence(f'Newton did not converge at lambda={spec.lam:g} in {NEWTON_MAX_ITER} iterations.')

    J = jacobian(z, t, spec)
    conditioning = _conditioning(J, _factorize(J))
    near_singular = conditioning > NEAR_SINGULAR
    if near_singular:
        logger.warning(f"Jacobian near singular at lambda={spec.lam:g} (conditioning {conditioning:.3g})")
    return BranchPoint(spec.lam, t, z, iteration, r_norm, conditioning, near_singular)


def _threshold_for(spec):
    datum = spec.datum
    if spec.k != 2 or datum.is_zero or not datum.is_nonnegative:
        return None
    try:
        return nonexistence_threshold(datum, spec.N, spec.boundary).lambda_bar
    except KHessianError as e:
        logger.warning(f"No threshold for the fold check: {e}")
        return None


def continue_branch(spec, lambda_step=0.5, lambda_max=1000.0, direction=1, T=GRID_T, nodes=GRID_NODES):
    """
    Natural-parameter continuation from (lambda, z) = (0, 0) toward
    ``direction * lambda_max``. A failed step is halved and never regrown;
    once it falls below MIN_LAMBDA_STEP the last accepted lambda is reported
    as the fold.
    """
    if lambda_step <= 0 or lambda_max <= 0:
        raise DomainError('Continuation step and range must be positive.', code='continuation')
    if direction not in (1, -1):
        raise DomainError(f'Direction must be +1 or -1, got {direction}.', code='continuation')

    t = branch_grid(spec.boundary, T, nodes)
    point = newton_solve(spec, 0.0, t_grid=t)
    points = [point]
    lam, step, fold = 0.0, float(lambda_step), None
    while abs(lam) < lambda_max:
        target = direction * min(abs(lam) + step, lambda_max)
        try:
            point = newton_solve(spec, target, guess=point.solution, t_grid=t)
        except (NoConvergence, FoldSignal) as e:
            step /= 2
            logger.debug(f"Step to lambda={target:g} failed ({e}); step now {step:.3g}")
            if step < MIN_LAMBDA_STEP:
                fold = lam
                break
            continue
        points.append(point)
        lam = target

    lambda_bar = _threshold_for(spec) if direction > 0 else None
    consistent = None
    if lambda_bar is not None:
        consistent = (lam if fold is None else fold) <= lambda_bar
        if not consistent:
            logger.warning(f"Branch at lambda={lam:g} passes the non-existence bound {lambda_bar:g}")
    if fold is None:
        logger.info(f"Continuation reached lambda={lam:g} with {len(points)} points")
    else:
        logger.info(f"Fold near lambda={fold:.10g} after {len(points)} points (bound {lambda_bar})")
    report = FoldReport(direction, lam, fold, lambda_bar, consistent)
    return ContinuationResult(tuple(points), report)


def operator_residual(phi, phi_dd, potential):
    """Sup-norm of -phi'' + potential * phi."""
    phi = np.asarray(phi, dtype=float)
    if not np.any(phi) and not np.any(phi_dd):
        return 0.0
    return float(np.max(np.abs(-np.asarray(phi_dd) + np.asarray(potential) * phi)))


def _closed_form(a, c, numerator, denominator, t):
    """
    phi = e^{a t} P(x) / Q(x) with x = e^{c t}, and phi'' from exact
    polynomial derivatives.
    """
    x = np.exp(c * t)
    P, Q = numerator, denominator
    N1 = P.deriv() * Q - P * Q.deriv()
    R = P(x) / Q(x)
    R1 = N1(x) / Q(x) ** 2
    R2 = (N1.deriv() * Q - 2 * N1 * Q.deriv())(x) / Q(x) ** 3
    scale = np.exp(a * t)
    phi = scale * R
    phi_dd = scale * (a * a * R + 2 * a * c * x * R1 + c * c * (x * R1 + x * x * R2))
    return phi, phi_dd


def kernel_check(t0=0.0, t_range=KERNEL_CHECK_RANGE, nodes=KERNEL_CHECK_NODES):
    """
    Residuals at the N = 4 homoclinic z*(t) = 16 X x / (x + X)^2, x = e^{2t},
    X = e^{2 t0}:

    - the translation mode dz*/dt under -phi'' + (b0 - 2 alpha z*) phi;
    - e^t (x^2 - 3 X x + X^2) / (x + X)^3 under -phi'' + (c - 48 X x / (x + X)^2) phi
      for c = 1 and c = 4.
    """
    co = coefficients(2, 4)
    t = np.linspace(t_range[0], t_range[1], nodes)
    X = math.exp(2 * t0)
    x = Polynomial([0.0, 1.0])
    Q = (x + X) ** 2

    profile = 16 * X * x
    z_star = profile(np.exp(2 * t)) / Q(np.exp(2 * t))
    # dz*/dt = 2 x d/dx (P / Q)
    mode = 2 * x * (profile.deriv() * Q - profile * Q.deriv())
    phi, phi_dd = _closed_form(0.0, 2.0, mode, Q ** 2, t)
    translation = operator_residual(phi, phi_dd, co.b0 - 2 * co.alpha * z_star)

    kernel, kernel_dd = _closed_form(1.0, 2.0, x ** 2 - 3 * X * x + X ** 2, (x + X) ** 3, t)
    well = 3 * z_star
    printed = operator_residual(kernel, kernel_dd, 1.0 - well)
    corrected = operator_residual(kernel, kernel_dd, 4.0 - well)
    logger.info(
        f"Kernel check t0={t0:g}: translation {translation:.3e}, constant 1 {printed:.3e}, constant 4 {corrected:.3e}"
    )
    return KernelCheckReport(
        t0, translation, printed, corrected, extras={'t_range': list(t_range), 'nodes': nodes},
    )
