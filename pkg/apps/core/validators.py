"""
Custom validators for khessian inputs.
"""
import math

import numpy as np

from .constants import MAX_TOL, MIN_TOL
from .exceptions import DomainError, UnsupportedOrderError


class TabulatedSamplesValidator:
    """
    Validate (s, g) samples of a tabulated forcing datum.
    """

    def __call__(self, s_values, g_values):
        s = np.asarray(s_values, dtype=float)
        g = np.asarray(g_values, dtype=float)
        if s.ndim != 1 or s.shape != g.shape:
            raise DomainError('Tabulated samples must be two aligned columns.', code='tabulated_shape')
        if s.size < 2:
            raise DomainError('Tabulated datum needs at least two samples.', code='tabulated_size')
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(g))):
            raise DomainError('Tabulated samples must be finite.', code='tabulated_finite')
        if s[0] != 0.0:
            raise DomainError(f'Tabulated samples must start at s=0, got s={s[0]}.', code='tabulated_origin')
        if np.any(np.diff(s) <= 0):
            raise DomainError('Tabulated s values must be strictly increasing.', code='tabulated_order')

    def get_help_text(self):
        return 'Samples start at s=0, increase strictly in s and are finite.'


def validate_order(k, N):
    """
    Validate Hessian order and dimension: 2 <= k <= N, N >= 2.
    """
    if int(N) != N or int(k) != k:
        raise DomainError(f'k and N must be integers, got k={k}, N={N}.', code='order_type')
    if N < 2:
        raise DomainError(f'Dimension N must be at least 2, got {N}.', code='dimension')
    if k < 2 or k > N:
        raise DomainError(f'Hessian order must satisfy 2 <= k <= N, got k={k}, N={N}.', code='order')


def validate_nonlinear_order(k):
    """
    Validate that a nonlinear solver supports the Hessian order.
    """
    if k not in (2, 3):
        raise UnsupportedOrderError(f'Unsupported order k={k}; solvers handle k in {{2, 3}}.', code='unsupported_order')


def validate_finite(name, value):
    """
    Validate that a scalar parameter is finite.
    """
    if not math.isfinite(value):
        raise DomainError(f'{name} must be finite, got {value}.', code='not_finite')


def validate_tolerance(tol):
    """
    Validate an integration tolerance.
    """
    if not (MIN_TOL <= tol <= MAX_TOL):
        raise DomainError(f'Tolerance must lie in [{MIN_TOL:g}, {MAX_TOL:g}], got {tol:g}.', code='tolerance')


def validate_grid(t_grid, min_points=2, uniform=False):
    """
    Validate a strictly increasing grid, optionally uniformly spaced.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < min_points:
        raise DomainError(f'Grid needs at least {min_points} points, got {t.size}.', code='grid_size')
    steps = np.diff(t)
    if np.any(steps <= 0):
        raise DomainError('Grid must be strictly increasing.', code='grid_order')
    if uniform and not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise DomainError('Grid must be uniformly spaced.', code='grid_uniform')
    return t


def validate_aligned(*arrays):
    """
    Validate that grid functions share one length.
    """
    lengths = {np.shape(a)[0] for a in arrays}
    if len(lengths) != 1:
        raise DomainError(f'Grid functions have mismatched lengths {sorted(lengths)}.', code='mismatched')
