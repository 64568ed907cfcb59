"""
Solution profiles carried between the z, w and u variables.
"""
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from apps.core.exceptions import DomainError, FitError
from apps.core.models import Boundary
from apps.core.validators import validate_finite


@dataclass(frozen=True, eq=False)
class SolutionProfile:
    t_grid: np.ndarray
    z_values: np.ndarray
    w_values: np.ndarray
    r_grid: np.ndarray
    u_values: np.ndarray
    boundary: Boundary
    radius: float = 1.0

    @cached_property
    def _u_spline(self):
        return CubicSpline(self.t_grid, self.u_values)

    def u_at(self, r):
        """
        Radial solution at radii r; r = 0 maps to the last grid node.
        """
        r = np.asarray(r, dtype=float)
        with np.errstate(divide='ignore'):
            t = -np.log(r / self.radius)
        return self._u_spline(np.clip(t, self.t_grid[0], self.t_grid[-1]))

    @cached_property
    def decay_exponent(self):
        """Fitted exponent of the z tail at t -> +inf, or None when the tail has no fixed sign."""
        from apps.integrate.models import Trajectory
        from apps.integrate.utils import fit_decay_exponent
        try:
            return fit_decay_exponent(Trajectory.from_samples(self.t_grid, self.z_values), window=0.2)
        except FitError:
            return None

    def rescaled(self, radius, gamma):
        """
        The profile on the ball (or space) scaled by ``radius``:
        u_R(r) = R^{1-gamma} u(r / R), which solves the same equation with
        forcing lambda R^{-3-gamma} f(r / R). z and w stay on the scaled t.
        """
        validate_finite('radius', radius)
        if radius <= 0:
            raise DomainError(f'Radius must be positive, got {radius:g}.', code='radius')
        factor = radius / self.radius
        return replace(
            self,
            r_grid=self.r_grid * factor,
            u_values=self.u_values * factor ** (1.0 - gamma),
            radius=float(radius),
        )

    @property
    def sup_norm(self):
        return float(np.max(np.abs(self.z_values)))

    def to_rows(self):
        return list(zip(
            self.t_grid.tolist(),
            self.z_values.tolist(),
            self.w_values.tolist(),
            self.r_grid.tolist(),
            self.u_values.tolist(),
        ))
