"""
Exception hierarchy for khessian.
"""
from django.core.exceptions import ValidationError


class KHessianError(Exception):
    """Base class for every error raised by the solver apps."""


class DomainError(ValidationError, KHessianError):
    """
    Input outside the admissible domain of an operation.
    """

    def __str__(self):
        return '; '.join(self.messages)


class UnsupportedOrderError(DomainError):
    """Nonlinear solvers only handle k in {2, 3}."""


class ConfigError(DomainError):
    """
    Invalid run configuration, carrying the dotted path of the failing key.
    """

    def __init__(self, message, key_path=''):
        self.key_path = key_path
        text = f'{key_path}: {message}' if key_path else message
        super().__init__(text, code='config')


class ExtrapolationError(KHessianError):
    """Tabulated datum queried outside its samples."""


class NumericError(KHessianError):
    """Non-finite state or value."""


class StiffnessError(NumericError):
    """Step size underflow in the explicit integrator."""


class FitError(KHessianError):
    """Decay fit on a tail with zeros or sign changes."""


class StencilError(KHessianError):
    """Grid too coarse or not uniform for the finite-difference stencils."""


class TruncationError(KHessianError):
    """Tails of an entire profile have not decayed."""


class DivergenceError(KHessianError):
    """Green input not integrable against the kernel."""


class NonAutonomousError(KHessianError):
    """Operation requires lambda = 0."""


class NotSaddleError(KHessianError):
    """No one-dimensional invariant manifold at the equilibrium."""


class PreconditionError(KHessianError):
    """Operation precondition violated."""


class DegenerateDatumError(PreconditionError):
    """Forcing datum vanishes identically."""


class ConvergenceError(KHessianError):
    """Solver-reported non-convergence."""


class IterationOrderError(ConvergenceError):
    """Monotone iterates left their order beyond the allowed slack."""


class MaxIterationsError(ConvergenceError):
    """Iteration limit reached."""


class NoConvergence(ConvergenceError):
    """Damped Newton failed to reduce the residual."""


class FoldSignal(ConvergenceError):
    """Jacobian is singular at the current point."""
