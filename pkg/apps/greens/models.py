"""
Green kernels of constant-coefficient operators and the reports built on them.
"""
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from apps.core.exceptions import DomainError
from apps.core.models import Boundary


@dataclass(frozen=True)
class GreenKernel:
    """
    Inverse of L = -d^2/dt^2 + b1 d/dt + c0 whose characteristic roots
    satisfy mu_minus < 0 <= mu_plus.

    Half-line kernels add B e^{mu_minus t} to the entire kernel restricted to
    t >= 0, with B fixed by the t = 0 boundary row.
    """
    b1: float
    c0: float
    mu_plus: float
    mu_minus: float
    boundary: Boundary
    nav_slope: float = 0.0

    @classmethod
    def for_operator(cls, b1, c0, boundary=Boundary.ENTIRE, nav_slope=0.0):
        disc = b1 ** 2 + 4 * c0
        if disc <= 0:
            raise DomainError(f'Operator with b1={b1:g}, c0={c0:g} has no real root pair.', code='kernel_roots')
        root = math.sqrt(disc)
        mu_plus, mu_minus = (b1 + root) / 2, (b1 - root) / 2
        if not (mu_minus < 0 <= mu_plus):
            raise DomainError(
                f'Kernel needs roots of opposite sign, got {mu_plus:g} and {mu_minus:g}.', code='kernel_roots'
            )
        boundary = Boundary(boundary)
        if boundary is Boundary.NAVIER and nav_slope <= mu_minus:
            raise DomainError(f'Navier slope {nav_slope:g} must exceed the decay root {mu_minus:g}.', code='kernel_slope')
        return cls(float(b1), float(c0), mu_plus, mu_minus, boundary, float(nav_slope))

    @classmethod
    def for_problem(cls, N, boundary, k=2):
        from apps.core.utils import coefficients
        co = coefficients(k, N)
        return cls.for_operator(co.b1, co.b0, boundary, N - 1 - co.gamma)

    @property
    def normalization(self):
        return 1.0 / (self.mu_plus - self.mu_minus)

    def correction(self, z_half0):
        """Coefficient B of e^{mu_minus t} given the uncorrected half-line value at t = 0."""
        if self.boundary is Boundary.DIRICHLET:
            return -z_half0
        if self.boundary is Boundary.NAVIER:
            m = self.nav_slope
            return (self.mu_plus - m) * z_half0 / (m - self.mu_minus)
        return 0.0

    def entire(self, t, s):
        """Pointwise entire-line kernel G(t, s)."""
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        mu = np.where(s <= t, self.mu_minus, self.mu_plus)
        return self.normalization * np.exp(mu * (t - s))

    def as_dict(self):
        return {
            'b1': self.b1,
            'c0': self.c0,
            'mu_plus': self.mu_plus,
            'mu_minus': self.mu_minus,
            'normalization': self.normalization,
            'boundary': self.boundary.value,
            'nav_slope': self.nav_slope,
        }


@dataclass(frozen=True, eq=False)
class ForcingProfile:
    f2: Callable
    f1: Callable
    t_grid: np.ndarray
    z1: np.ndarray
    z_lambda: np.ndarray


@dataclass(frozen=True, eq=False)
class MonotoneResult:
    t_grid: np.ndarray
    solution: np.ndarray
    iterates: int
    history: tuple
    residual: float
    fd_residual: float
    shift: float

    def profile(self, spec):
        from apps.transform.utils import build_profile
        return build_profile(self.t_grid, self.solution, spec)

    def as_dict(self):
        return {
            'iterates': self.iterates,
            'residual': self.residual,
            'fd_residual': self.fd_residual,
            'shift': self.shift,
            'sup_norm': float(np.max(np.abs(self.solution))),
            'history': list(self.history),
        }


@dataclass(frozen=True)
class ThresholdReport:
    C1: float
    C2: float
    lambda_bar: float
    quadrature_error_estimate: float
    nodes: int

    def as_dict(self):
        return {
            'C1': self.C1,
            'C2': self.C2,
            'lambda_bar': self.lambda_bar,
            'quadrature_error_estimate': self.quadrature_error_estimate,
            'nodes': self.nodes,
        }


@dataclass(frozen=True)
class SharpnessRow:
    boundary: Boundary
    T: float
    weighted: float


@dataclass(frozen=True)
class SharpnessReport:
    N: int
    rows: tuple
    control: bool = False

    def for_boundary(self, boundary):
        return [row for row in self.rows if row.boundary is Boundary(boundary)]

    def certified(self, boundary, floor=1e-3):
        values = [row.weighted for row in sorted(self.for_boundary(boundary), key=lambda row: row.T)]
        return all(b >= a for a, b in zip(values, values[1:])) and values[-1] > floor

    @property
    def violation(self):
        return all(self.certified(boundary) for boundary in Boundary)

    def as_dict(self):
        return {
            'N': self.N,
            'control': self.control,
            'violation': self.violation,
            'rows': [{'boundary': row.boundary.value, 'T': row.T, 'W': row.weighted} for row in self.rows],
        }
