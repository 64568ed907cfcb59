"""
Branch points, the linearized operator and continuation reports.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from apps.core.models import Boundary


@dataclass(frozen=True, eq=False)
class BranchPoint:
    lam: float
    t_grid: np.ndarray
    solution: np.ndarray
    newton_iterations: int
    residual: float
    jacobian_conditioning: float
    near_singular: bool = False

    @property
    def sup_norm(self):
        return float(np.max(np.abs(self.solution)))

    def as_row(self):
        return (self.lam, self.sup_norm, self.newton_iterations, self.residual)

    def as_dict(self):
        return {
            'lambda': self.lam,
            'sup_norm': self.sup_norm,
            'newton_iterations': self.newton_iterations,
            'residual': self.residual,
            'jacobian_conditioning': self.jacobian_conditioning,
            'near_singular': self.near_singular,
        }


@dataclass(frozen=True, eq=False)
class LinearizedOperator:
    """
    phi -> -phi'' + b1 phi' + (b0 - k alpha z*^{k-1}) phi on a uniform grid,
    with the boundary rows of the problem: z(0) = 0 (Dirichlet) or
    z'(0) - m z(0) = 0 (Navier) at the left end, z' - mu_plus z = 0 at -T
    for the entire line, and z' - mu_minus z = 0 at +T for every kind.
    """
    base_solution: np.ndarray
    t_grid: np.ndarray
    b1: float
    b0: float
    k: int
    alpha: float
    boundary: Boundary
    nav_slope: float
    mu_plus: float
    mu_minus: float

    @classmethod
    def at(cls, base_solution, t_grid, spec):
        co = spec.coefficients
        return cls(
            np.asarray(base_solution, dtype=float), np.asarray(t_grid, dtype=float),
            co.b1, co.b0, spec.k, co.alpha, spec.boundary, spec.navier_slope, co.mu_plus, co.mu_minus,
        )

    @property
    def h(self):
        return float(self.t_grid[1] - self.t_grid[0])

    @property
    def potential(self):
        return self.b0 - self.k * self.alpha * self.base_solution ** (self.k - 1)

    def matrix(self):
        n, h = self.t_grid.size, self.h
        lower = np.full(n - 1, -1 / h ** 2 - self.b1 / (2 * h))
        upper = np.full(n - 1, -1 / h ** 2 + self.b1 / (2 * h))
        diag = 2 / h ** 2 + self.potential
        J = sparse.diags([lower, diag, upper], [-1, 0, 1], format='lil')

        J[0, :3] = 0.0
        if self.boundary is Boundary.DIRICHLET:
            J[0, 0] = 1.0
        else:
            slope = self.nav_slope if self.boundary is Boundary.NAVIER else self.mu_plus
            J[0, 0] = -3 / (2 * h) - slope
            J[0, 1] = 4 / (2 * h)
            J[0, 2] = -1 / (2 * h)
        J[n - 1, n - 3:] = 0.0
        J[n - 1, n - 3] = 1 / (2 * h)
        J[n - 1, n - 2] = -4 / (2 * h)
        J[n - 1, n - 1] = 3 / (2 * h) - self.mu_minus
        return J.tocsc()

    def apply(self, phi):
        return self.matrix() @ np.asarray(phi, dtype=float)


@dataclass(frozen=True)
class FoldReport:
    direction: int
    reached: float
    fold_lambda: float = None
    lambda_bar: float = None
    bound_consistent: bool = None

    def as_dict(self):
        return {
            'direction': self.direction,
            'reached': self.reached,
            'fold_lambda': self.fold_lambda,
            'lambda_bar': self.lambda_bar,
            'bound_consistent': self.bound_consistent,
        }


@dataclass(frozen=True, eq=False)
class ContinuationResult:
    points: tuple
    report: FoldReport

    def rows(self):
        return [point.as_row() for point in self.points]


@dataclass(frozen=True)
class KernelCheckReport:
    t0: float
    translation_mode_residual: float
    kernel_residual_constant_1: float
    kernel_residual_constant_4: float
    extras: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            't0': self.t0,
            'translation_mode_residual': self.translation_mode_residual,
            'kernel_residual_constant_1': self.kernel_residual_constant_1,
            'kernel_residual_constant_4': self.kernel_residual_constant_4,
            **self.extras,
        }
