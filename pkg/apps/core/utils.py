"""
Core utilities: derived coefficients, forcing, the planar vector field and the
decay assumption on forcing data.
"""
import logging
import math
from functools import lru_cache

import numpy as np
from scipy.special import comb

from .constants import ASSUMPTION_SAMPLES, ASSUMPTION_T_MAX, ASSUMPTION_THRESHOLD
from .exceptions import DomainError, NumericError
from .models import AssumptionReport, Boundary, Coefficients, Datum, DatumKind, TailVerdict
from .validators import validate_order

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def coefficients(k, N):
    """
    Derived constants of the autonomous equation for Hessian order k in dimension N.
    """
    validate_order(k, N)
    gamma = (3 - k) / (k - 1)
    alpha = comb(N - 1, k - 1, exact=True) / k
    b1 = N - 2 - 2 * gamma
    b0 = N - 1 + gamma * (N - 2) - gamma ** 2
    root = math.sqrt(b1 ** 2 + 4 * b0)
    return Coefficients(
        k=k,
        N=N,
        gamma=gamma,
        alpha=alpha,
        b1=b1,
        b0=b0,
        mu_plus=(b1 + root) / 2,
        mu_minus=(b1 - root) / 2,
    )


def forcing_F(t, spec):
    """
    e^{(N-3-gamma) t} * cumulative(e^{-t}); lambda is applied by callers.
    """
    value = spec.datum.weighted_cumulative(t, spec.N - 3 - spec.coefficients.gamma)
    return float(value) if np.ndim(value) == 0 else value


def vector_field(state, t, spec):
    """
    Planar field (dz, dy) = (y, b1 y + b0 z - alpha z^k - lambda F(t)).
    """
    z, y = float(state[0]), float(state[1])
    if not (math.isfinite(z) and math.isfinite(y)):
        raise NumericError(f'Non-finite state ({z}, {y}) at t={t}.')
    co = spec.coefficients
    dy = co.b1 * y + co.b0 * z - co.alpha * z ** spec.k
    if spec.lam != 0.0:
        dy -= spec.lam * forcing_F(t, spec)
    return np.array([y, dy])


def planar_field(spec):
    """
    The vector field as a ``fun(t, state)`` callable for the integrator.
    """
    co = spec.coefficients
    b1, b0, alpha, k, lam = co.b1, co.b0, co.alpha, spec.k, spec.lam

    if lam == 0.0:
        def fun(t, state):
            z, y = state
            return np.array([y, b1 * y + b0 * z - alpha * z ** k])
    else:
        def fun(t, state):
            z, y = state
            return np.array([y, b1 * y + b0 * z - alpha * z ** k - lam * forcing_F(t, spec)])
    return fun


def _sampled_tail(datum, rate):
    # stay inside the samples: s = e^{-t} <= s_max
    start = 0.01
    if not datum.compact_support and datum.s_max < 1.0:
        start = max(start, 1e-9 - math.log(datum.s_max))
    t = np.geomspace(min(start, ASSUMPTION_T_MAX / 10), ASSUMPTION_T_MAX, ASSUMPTION_SAMPLES)
    t = np.maximum(t, start)
    values = np.abs(datum.weighted_cumulative(t, rate))
    tail = values[t >= ASSUMPTION_T_MAX / 10]
    steps = np.diff(tail)
    if tail[-1] < ASSUMPTION_THRESHOLD and np.all(steps <= 0):
        return TailVerdict.HOLDS, f'sampled expression decays to {tail[-1]:.3g} at t={ASSUMPTION_T_MAX:g}'
    if np.all(steps >= 0) and tail[-1] > 1.0:
        return TailVerdict.VIOLATED, f'sampled expression grows to {tail[-1]:.3g} at t={ASSUMPTION_T_MAX:g}'
    return TailVerdict.INCONCLUSIVE, f'sampled expression neither decays nor grows clearly (last value {tail[-1]:.3g})'


def _plus_infinity(datum, rate):
    if datum.kind is DatumKind.POWER_LAW:
        exponent = rate - (datum.p + 1)
        verdict = TailVerdict.HOLDS if exponent < 0 else TailVerdict.VIOLATED
        return verdict, f'exponent {exponent:g} at t -> +inf'
    if datum.kind is DatumKind.INDICATOR:
        if datum.a > 0:
            return TailVerdict.HOLDS, 'datum vanishes near s = 0'
        exponent = rate - 1
        verdict = TailVerdict.HOLDS if exponent < 0 else TailVerdict.VIOLATED
        return verdict, f'exponent {exponent:g} at t -> +inf'
    return _sampled_tail(datum, rate)


def _minus_infinity(datum, rate):
    if datum.kind is DatumKind.POWER_LAW:
        exponent = rate - (datum.p + 1)
        verdict = TailVerdict.HOLDS if exponent > 0 else TailVerdict.VIOLATED
        return verdict, f'exponent {exponent:g} at t -> -inf'
    if datum.compact_support:
        verdict = TailVerdict.HOLDS if rate > 0 else TailVerdict.VIOLATED
        return verdict, f'bounded cumulative, exponent {rate:g} at t -> -inf'
    return TailVerdict.INCONCLUSIVE, 'tabulated samples do not determine the cumulative as s -> inf'


def assumption_check(datum, N, boundary, k=2):
    """
    Decide whether e^{(N-2-gamma) t} * cumulative(e^{-t}) vanishes at +inf,
    and also at -inf for the entire problem.
    """
    boundary = Boundary(boundary)
    if datum.is_zero:
        minus = TailVerdict.HOLDS if boundary is Boundary.ENTIRE else TailVerdict.NOT_REQUIRED
        return AssumptionReport(True, 'zero datum', TailVerdict.HOLDS, minus)

    rate = N - 2 - coefficients(k, N).gamma
    plus, witness = _plus_infinity(datum, rate)
    minus = TailVerdict.NOT_REQUIRED
    if boundary is Boundary.ENTIRE:
        minus, minus_witness = _minus_infinity(datum, rate)
        witness = f'{witness}; {minus_witness}'

    holds = plus is TailVerdict.HOLDS and minus in (TailVerdict.HOLDS, TailVerdict.NOT_REQUIRED)
    logger.debug(f"Assumption check N={N} k={k} {boundary.value}: {witness}")
    return AssumptionReport(holds, witness, plus, minus)


def load_tabulated_datum(path):
    """
    Load a tabulated datum from a two-column CSV with header ``s,g``.
    """
    try:
        data = np.genfromtxt(path, delimiter=',', names=True, dtype=float)
    except (OSError, ValueError) as e:
        logger.error(f"Could not read tabulated datum {path}: {e}")
        raise DomainError(f'Could not read tabulated datum {path}: {e}', code='tabulated_file')
    if data.dtype.names != ('s', 'g'):
        raise DomainError(f'Tabulated datum {path} must have header s,g, got {data.dtype.names}.', code='tabulated_header')
    return Datum.tabulated(zip(np.atleast_1d(data['s']), np.atleast_1d(data['g'])))
