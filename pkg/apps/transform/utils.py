"""
Change of variables between u(r), w(t) and z(t), reconstruction of u and the
radial residual.
"""
import logging

import numpy as np
from scipy.integrate import cumulative_simpson

from apps.core.exceptions import DomainError, FitError, StencilError, TruncationError
from apps.core.models import Boundary
from apps.core.validators import validate_aligned, validate_grid

from .models import SolutionProfile

logger = logging.getLogger(__name__)

TAIL_DECAY = 1e-10
TAIL_WINDOW = 0.1

# integer weights of the fourth-order centred stencils
FIRST = (np.array([1, -8, 0, 8, -1]), 12)
SECOND = (np.array([-1, 16, -30, 16, -1]), 12)
THIRD = (np.array([1, -8, 13, 0, -13, 8, -1]), 8)
MIN_STENCIL_POINTS = 7


def z_from_w(w_values, t_grid, gamma):
    validate_aligned(w_values, t_grid)
    return np.exp(-gamma * np.asarray(t_grid, dtype=float)) * np.asarray(w_values, dtype=float)


def w_from_z(z_values, t_grid, gamma):
    validate_aligned(z_values, t_grid)
    return np.exp(gamma * np.asarray(t_grid, dtype=float)) * np.asarray(z_values, dtype=float)


def cumulative_integral(values, t):
    """
    Running integral from t[0]. Uniform grids integrate every cell with the
    cubic through four neighbouring nodes; the end cells extrapolate the
    missing neighbour with a quartic so the error stays smooth up to the ends.
    """
    steps = np.diff(t)
    if t.size < 5 or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        return cumulative_simpson(values, x=t, initial=0.0)
    f = values
    cells = np.concatenate([
        [8 * f[0] + 23 * f[1] - 11 * f[2] + 5 * f[3] - f[4]],
        -f[:-3] + 13 * f[1:-2] + 13 * f[2:-1] - f[3:],
        [-f[-5] + 5 * f[-4] - 11 * f[-3] + 23 * f[-2] + 8 * f[-1]],
    ]) * (steps[0] / 24)
    return np.concatenate([[0.0], np.cumsum(cells)])


def _entire_tail(t, integrand):
    """
    Integral of the integrand over (-inf, t[0]) from an exponential fit of its
    first window.
    """
    if integrand[0] == 0.0:
        return 0.0
    window = t <= t[0] + TAIL_WINDOW * (t[-1] - t[0])
    head = integrand[window]
    if np.any(head == 0) or np.any(np.sign(head) != np.sign(head[0])):
        raise FitError('Entire tail has zeros or sign changes near t = -T.')
    kappa, _ = np.polyfit(t[window], np.log(np.abs(head)), 1)
    if kappa <= 0:
        raise TruncationError(f'Integrand does not decay toward t = -inf (fitted exponent {kappa:.4g}).')
    return float(integrand[0] / kappa)


def reconstruct_u(profile, spec, anchor=None):
    """
    u(r) from u'(r) = -w(-ln r): ball problems integrate from r = 1 where u = 0,
    entire problems from r = inf where u vanishes. A finite ``anchor`` t pins
    u(e^{-anchor}) = 0 instead, for entire profiles whose z tends to a nonzero
    level as r -> inf and whose u grows logarithmically there.
    """
    t = validate_grid(profile.t_grid, min_points=3)
    integrand = np.asarray(profile.w_values, dtype=float) * np.exp(-t)
    if not np.any(integrand):
        return np.zeros_like(t)
    u = cumulative_integral(integrand, t)

    if anchor is not None:
        if not t[0] <= anchor <= t[-1]:
            raise DomainError(f'Anchor t={anchor:g} lies outside the grid [{t[0]:g}, {t[-1]:g}].', code='profile_anchor')
        return u - float(np.interp(anchor, t, u))

    if Boundary(profile.boundary).is_half_line:
        if t[0] != 0.0:
            raise DomainError(f'Ball profiles must start at t=0, got t={t[0]}.', code='profile_origin')
        return u

    scale = np.max(np.abs(integrand))
    z = np.asarray(profile.z_values, dtype=float)
    if abs(integrand[0]) > TAIL_DECAY * scale or abs(z[-1]) > TAIL_DECAY * np.max(np.abs(z)):
        raise TruncationError(
            f'Entire profile tails have not decayed below {TAIL_DECAY:g} relative '
            f'(left {abs(integrand[0]) / scale:.3g}, right {abs(z[-1]) / np.max(np.abs(z)):.3g}).'
        )
    return u + _entire_tail(t, integrand)


def build_profile(t_grid, z_values, spec, anchor=None):
    """
    Profile with w, r and the reconstructed u for a z solution on ``t_grid``.
    """
    t = validate_grid(t_grid, min_points=3)
    z = np.asarray(z_values, dtype=float)
    validate_aligned(t, z)
    w = w_from_z(z, t, spec.coefficients.gamma)
    partial = SolutionProfile(t, z, w, np.exp(-t), np.zeros_like(t), spec.boundary)
    u = reconstruct_u(partial, spec, anchor)
    return SolutionProfile(t, z, w, np.exp(-t), u, spec.boundary)


def _apply(values, stencil, h, power):
    weights, divisor = stencil
    m = len(weights) // 2
    n = len(values)
    out = np.zeros(n - 2 * (MIN_STENCIL_POINTS // 2))
    for j, weight in enumerate(weights):
        if weight:
            shift = j - m
            out += weight * values[3 + shift:n - 3 + shift]
    return out / (divisor * h ** power)


def _derivatives(u, r):
    """
    u', u'', u''' at interior nodes of a grid uniform in r or in ln r.
    """
    steps = np.diff(r)
    if np.allclose(steps, steps[0], rtol=1e-6, atol=0.0):
        h = steps[0]
        return _apply(u, FIRST, h, 1), _apply(u, SECOND, h, 2), _apply(u, THIRD, h, 3)
    s = np.log(r)
    log_steps = np.diff(s)
    if np.allclose(log_steps, log_steps[0], rtol=1e-6, atol=0.0):
        h = log_steps[0]
        u_s, u_ss, u_sss = _apply(u, FIRST, h, 1), _apply(u, SECOND, h, 2), _apply(u, THIRD, h, 3)
        rr = r[3:-3]
        return u_s / rr, (u_ss - u_s) / rr ** 2, (u_sss - 3 * u_ss + 2 * u_s) / rr ** 3
    raise StencilError('Residual stencils need a grid uniform in r or in ln r.')


def radial_residual(u_values, r_grid, spec):
    """
    Maximum absolute residual of the once-integrated radial equation
    r^{N-1} (Delta u)' = (-1)^k alpha r^{N-k} (u')^k + lambda * int_0^r g
    over nodes where the seven-point stencil fits.
    """
    u = np.asarray(u_values, dtype=float)
    r = np.asarray(r_grid, dtype=float)
    validate_aligned(u, r)
    if r.size < MIN_STENCIL_POINTS:
        raise StencilError(f'Radial residual needs at least {MIN_STENCIL_POINTS} points, got {r.size}.')
    if r[0] > r[-1]:
        u, r = u[::-1], r[::-1]
    if np.any(np.diff(r) <= 0) or r[0] <= 0:
        raise StencilError('Radial grid must be strictly monotone and positive.')

    N, k = spec.N, spec.k
    alpha = spec.coefficients.alpha
    du, d2u, d3u = _derivatives(u, r)
    rr = r[3:-3]
    flux = rr ** (N - 1) * (d3u + (N - 1) * (d2u / rr - du / rr ** 2))
    hessian = (-1) ** k * alpha * rr ** (N - k) * du ** k
    residual = flux - hessian
    if spec.lam != 0.0:
        residual = residual - spec.lam * spec.datum.cumulative(rr)
    return float(np.max(np.abs(residual)))
