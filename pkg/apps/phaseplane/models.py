"""
Phase-plane types: equilibria, manifold traces and certificates.
"""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class Classification(str, Enum):
    SADDLE = 'saddle'
    SOURCE_NODE = 'source node'
    SOURCE_FOCUS = 'source focus'
    SINK_NODE = 'sink node'
    SINK_FOCUS = 'sink focus'
    CENTER = 'center'
    DEGENERATE = 'degenerate'


class Branch(str, Enum):
    STABLE_LEFT = 'stable_left'
    STABLE_RIGHT = 'stable_right'
    UNSTABLE_LEFT = 'unstable_left'
    UNSTABLE_RIGHT = 'unstable_right'

    @property
    def stable(self):
        return self in (Branch.STABLE_LEFT, Branch.STABLE_RIGHT)

    @property
    def side(self):
        return 1.0 if self in (Branch.STABLE_RIGHT, Branch.UNSTABLE_RIGHT) else -1.0


class VerdictKind(str, Enum):
    HOMOCLINIC = 'homoclinic'
    HETEROCLINIC = 'heteroclinic'
    AXIS_CROSSING = 'axis_crossing'
    LINE_CROSSING = 'line_crossing'
    UNBOUNDED = 'unbounded'
    BOUNDED = 'bounded'


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    # target equilibrium for heteroclinic verdicts, crossing state for crossings
    point: tuple = None

    def as_dict(self):
        return {'kind': self.kind.value, 'point': list(self.point) if self.point is not None else None}


@dataclass(frozen=True, eq=False)
class Equilibrium:
    point: tuple
    jacobian: np.ndarray
    eigenvalues: tuple
    eigenvectors: tuple
    classification: Classification

    @property
    def is_real(self):
        return all(mu.imag == 0 for mu in self.eigenvalues)

    def as_dict(self):
        return {
            'point': list(self.point),
            'jacobian': self.jacobian.tolist(),
            'eigenvalues': [[mu.real, mu.imag] for mu in self.eigenvalues],
            'eigenvectors': [list(v) for v in self.eigenvectors] if self.eigenvectors else None,
            'classification': self.classification.value,
        }


@dataclass(frozen=True, eq=False)
class ManifoldTrace:
    branch: Branch
    offset: float
    trajectory: object
    verdict: Verdict
    equilibrium: Equilibrium = None
    crossings: tuple = ()
    peaks: tuple = ()
    verdict_stable: bool = None

    @property
    def max_z(self):
        return float(np.max(self.trajectory.z))

    def as_dict(self):
        return {
            'branch': self.branch.value,
            'offset': self.offset,
            'verdict': self.verdict.as_dict(),
            'verdict_stable': self.verdict_stable,
            'crossings': [{'name': hit.name, 't': hit.t, 'state': list(hit.state)} for hit in self.crossings],
            'terminal': self.trajectory.terminal.kind.value,
            't_end': self.trajectory.terminal.t,
        }


@dataclass(frozen=True)
class CertificateReport:
    """
    Floating-point evidence, not a proof: boundary-set crossings of the
    stable manifold of the origin.
    """
    dirichlet: tuple
    navier: tuple
    traces: tuple = field(default=(), compare=False)

    @property
    def verdict(self):
        if self.dirichlet or self.navier:
            return 'crossings_found'
        return 'no_crossings'

    def as_dict(self):
        return {
            'evidence': 'floating-point',
            'verdict': self.verdict,
            'dirichlet': [list(state) for state in self.dirichlet],
            'navier': [list(state) for state in self.navier],
            'traces': [trace.as_dict() for trace in self.traces],
        }


@dataclass(frozen=True)
class Portrait:
    equilibria: tuple
    traces: tuple

    def as_dict(self):
        return {
            'equilibria': [eq.as_dict() for eq in self.equilibria],
            'traces': [dict(trace.as_dict(), equilibrium=list(trace.equilibrium.point)) for trace in self.traces],
        }


@dataclass(frozen=True, eq=False)
class EntireConnection:
    """
    Nontrivial entire solution for lambda = 0 read off the stable manifold
    of the origin. ``anchor`` is the t where u was pinned to zero, or None
    when u vanishes at infinity.
    """
    trace: ManifoldTrace
    profile: object
    shift: float
    anchor: float = None

    @property
    def kind(self):
        return self.trace.verdict.kind

    def as_dict(self):
        return {
            'connection': self.kind.value,
            'target': list(self.trace.verdict.point),
            'shift': self.shift,
            'u_anchor_t': self.anchor,
            'sup_norm': self.profile.sup_norm,
            'u_max': float(self.profile.u_values.max()),
        }
