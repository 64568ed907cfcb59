"""
Domain types shared by every solver app.

Values are frozen after construction and safe to share between threads.
"""
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .exceptions import DomainError, ExtrapolationError
from .validators import TabulatedSamplesValidator, validate_finite, validate_order


class Boundary(str, Enum):
    DIRICHLET = 'dirichlet'
    NAVIER = 'navier'
    ENTIRE = 'entire'

    @property
    def is_half_line(self):
        return self is not Boundary.ENTIRE


class DatumKind(str, Enum):
    ZERO = 'zero'
    POWER_LAW = 'power_law'
    INDICATOR = 'indicator'
    TABULATED = 'tabulated'


@dataclass(frozen=True)
class Datum:
    """
    Radial forcing datum g(s) with its cumulative s -> integral of g over [0, s].

    Build instances through the classmethods; the raw constructor does not
    validate family parameters.
    """
    kind: DatumKind
    c: float = 0.0
    p: float = 0.0
    a: float = 0.0
    b: float = 0.0
    s_samples: tuple = ()
    g_samples: tuple = ()
    _cum_samples: np.ndarray = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind is DatumKind.TABULATED:
            s = np.asarray(self.s_samples, dtype=float)
            g = np.asarray(self.g_samples, dtype=float)
            object.__setattr__(self, '_cum_samples', cumulative_trapezoid(g, s, initial=0.0))

    @classmethod
    def zero(cls):
        return cls(DatumKind.ZERO)

    @classmethod
    def power_law(cls, c, p):
        """g(s) = c * s**p, integrable at 0 only for p > -1."""
        validate_finite('c', c)
        validate_finite('p', p)
        if p <= -1:
            raise DomainError(f'Power law exponent must exceed -1, got p={p}.', code='power_law_exponent')
        return cls(DatumKind.POWER_LAW, c=float(c), p=float(p))

    @classmethod
    def indicator(cls, a, b, c=1.0):
        """g(s) = c on [a, b], zero elsewhere."""
        for name, value in (('a', a), ('b', b), ('c', c)):
            validate_finite(name, value)
        if not 0 <= a < b:
            raise DomainError(f'Indicator needs 0 <= a < b, got a={a}, b={b}.', code='indicator_interval')
        return cls(DatumKind.INDICATOR, c=float(c), a=float(a), b=float(b))

    @classmethod
    def tabulated(cls, samples):
        """Samples are (s, g) pairs, starting at s = 0 and strictly increasing in s."""
        pairs = [(float(s), float(g)) for s, g in samples]
        s_values = tuple(s for s, _ in pairs)
        g_values = tuple(g for _, g in pairs)
        TabulatedSamplesValidator()(s_values, g_values)
        return cls(DatumKind.TABULATED, s_samples=s_values, g_samples=g_values)

    @property
    def s_max(self):
        return self.s_samples[-1] if self.kind is DatumKind.TABULATED else np.inf

    @property
    def compact_support(self):
        """Tabulated data ending in g = 0 are taken to vanish beyond the last sample."""
        if self.kind is DatumKind.TABULATED:
            return self.g_samples[-1] == 0.0
        return self.kind in (DatumKind.ZERO, DatumKind.INDICATOR)

    @property
    def is_zero(self):
        if self.kind is DatumKind.ZERO:
            return True
        if self.kind is DatumKind.TABULATED:
            return not any(self.g_samples)
        return self.c == 0.0

    @property
    def is_nonnegative(self):
        if self.kind is DatumKind.TABULATED:
            return min(self.g_samples) >= 0.0
        return self.c >= 0.0

    def g(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind is DatumKind.ZERO:
            return np.zeros_like(s)
        if self.kind is DatumKind.POWER_LAW:
            with np.errstate(divide='ignore'):
                return self.c * np.power(s, self.p)
        if self.kind is DatumKind.INDICATOR:
            return np.where((s >= self.a) & (s <= self.b), self.c, 0.0)
        self._check_range(s)
        return np.interp(s, self.s_samples, self.g_samples, right=0.0)

    def cumulative(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind is DatumKind.ZERO:
            return np.zeros_like(s)
        if self.kind is DatumKind.POWER_LAW:
            return self.c * np.power(s, self.p + 1.0) / (self.p + 1.0)
        if self.kind is DatumKind.INDICATOR:
            return self.c * (np.clip(s, self.a, self.b) - self.a)
        self._check_range(s)
        # interpolate the cumulative, never g, so that g >= 0 keeps it monotone
        return np.interp(s, self.s_samples, self._cum_samples)

    def _initial_slope(self):
        """(slope, kink): cumulative(s) == slope * s for 0 <= s <= kink."""
        if self.kind is DatumKind.INDICATOR:
            return (0.0, self.a) if self.a > 0 else (self.c, self.b)
        return self._cum_samples[1] / self.s_samples[1], self.s_samples[1]

    def weighted_cumulative(self, t, rate):
        """
        e^{rate t} * cumulative(e^{-t}), evaluated without forming e^{rate t}
        where e^{-t} sits on the linear stretch of the cumulative.
        """
        t = np.asarray(t, dtype=float)
        if self.kind is DatumKind.ZERO:
            return np.zeros_like(t)
        if self.kind is DatumKind.POWER_LAW:
            return self.c / (self.p + 1.0) * np.exp((rate - self.p - 1.0) * t)
        slope, kink = self._initial_slope()
        with np.errstate(over='ignore', under='ignore'):
            s = np.exp(-t)
            linear = s <= kink
            far = np.exp(rate * np.where(linear, 0.0, t)) * self.cumulative(np.where(linear, kink, s))
            if slope == 0.0:
                near = np.zeros_like(t)
            else:
                near = slope * np.exp((rate - 1.0) * np.where(linear, t, 0.0))
        return np.where(linear, near, far)

    def scaled(self, factor):
        if self.kind is DatumKind.TABULATED:
            return Datum.tabulated(zip(self.s_samples, (factor * g for g in self.g_samples)))
        if self.kind is DatumKind.ZERO:
            return self
        return replace(self, c=self.c * factor)

    def _check_range(self, s):
        if np.any(s < 0):
            raise ExtrapolationError('Tabulated datum queried at negative s.')
        if not self.compact_support and np.any(s > self.s_max):
            raise ExtrapolationError(
                f'Tabulated datum queried at s={float(np.max(s)):g} beyond its last sample {self.s_max:g}.'
            )

    def as_dict(self):
        data = {'kind': self.kind.value}
        if self.kind in (DatumKind.POWER_LAW, DatumKind.INDICATOR):
            data['c'] = self.c
        if self.kind is DatumKind.POWER_LAW:
            data['p'] = self.p
        if self.kind is DatumKind.INDICATOR:
            data.update(a=self.a, b=self.b)
        if self.kind is DatumKind.TABULATED:
            data['samples'] = len(self.s_samples)
        return data


@dataclass(frozen=True)
class Coefficients:
    """
    Constants of the autonomous z-equation
    -z'' + b1 z' + b0 z = alpha z^k + lambda F.
    """
    k: int
    N: int
    gamma: float
    alpha: float
    b1: float
    b0: float
    mu_plus: float
    mu_minus: float

    @property
    def root_gap(self):
        return self.mu_plus - self.mu_minus


@dataclass(frozen=True)
class ProblemSpec:
    k: int
    N: int
    lam: float = 0.0
    boundary: Boundary = Boundary.DIRICHLET
    datum: Datum = field(default_factory=Datum.zero)

    def __post_init__(self):
        validate_order(self.k, self.N)
        validate_finite('lambda', self.lam)
        object.__setattr__(self, 'boundary', Boundary(self.boundary))

    @cached_property
    def coefficients(self):
        from .utils import coefficients
        return coefficients(self.k, self.N)

    @property
    def navier_slope(self):
        """Slope m of the z-level Navier row z'(0) - m z(0) = 0."""
        return self.N - 1 - self.coefficients.gamma

    @property
    def is_autonomous(self):
        return self.lam == 0.0

    def with_lambda(self, lam):
        return replace(self, lam=float(lam))

    def with_boundary(self, boundary):
        return replace(self, boundary=Boundary(boundary))

    def as_dict(self):
        return {
            'k': self.k,
            'N': self.N,
            'lambda': self.lam,
            'boundary': self.boundary.value,
            'datum': self.datum.as_dict(),
        }


class TailVerdict(str, Enum):
    HOLDS = 'holds'
    VIOLATED = 'violated'
    INCONCLUSIVE = 'inconclusive'
    NOT_REQUIRED = 'not_required'


@dataclass(frozen=True)
class AssumptionReport:
    holds: bool
    witness: str
    plus_infinity: TailVerdict
    minus_infinity: TailVerdict = TailVerdict.NOT_REQUIRED

    @property
    def inconclusive(self):
        return TailVerdict.INCONCLUSIVE in (self.plus_infinity, self.minus_infinity)
