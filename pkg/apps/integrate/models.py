"""
Trajectory types for the planar integrator.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np


class TerminalKind(str, Enum):
    REACHED_END = 'reached_end'
    BLOW_UP = 'blow_up'
    EVENT = 'event'


@dataclass(frozen=True)
class Terminal:
    kind: TerminalKind
    t: float
    state: tuple
    name: str = ''


@dataclass(frozen=True)
class Event:
    """
    Zero of ``predicate(t, state)``; direction is taken along the run, so +1
    means the predicate increases as the integration progresses.
    """
    name: str
    predicate: Callable
    terminal: bool = False
    direction: int = 0

    def as_scipy_event(self):
        def fn(t, state):
            return self.predicate(t, state)
        fn.terminal = self.terminal
        fn.direction = self.direction
        return fn


@dataclass(frozen=True)
class EventHit:
    name: str
    t: float
    state: tuple


class PiecewiseDense:
    """
    Dense interpolant made of consecutive solver segments.
    """

    def __init__(self, segments):
        # each segment is (t_lo, t_hi, callable)
        self.segments = list(segments)

    def __call__(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty((2, t_arr.size))
        done = np.zeros(t_arr.size, dtype=bool)
        for lo, hi, fn in self.segments:
            mask = ~done & (t_arr >= lo) & (t_arr <= hi)
            if mask.any():
                out[:, mask] = np.reshape(fn(t_arr[mask]), (2, -1))
                done |= mask
        for i in np.flatnonzero(~done):
            # outside every segment: extrapolate from the nearest one
            value = t_arr[i]
            distance = [min(abs(value - lo), abs(value - hi)) for lo, hi, _ in self.segments]
            out[:, i] = np.reshape(self.segments[int(np.argmin(distance))][2](np.array([value])), 2)
        return out[:, 0] if np.ndim(t) == 0 else out


@dataclass(frozen=True, eq=False)
class Trajectory:
    t: np.ndarray
    states: np.ndarray
    terminal: Terminal
    tolerance_used: float
    events: tuple = ()
    dense: Callable = field(default=None, repr=False)

    @classmethod
    def from_samples(cls, t, z, y=None, tolerance_used=0.0):
        t = np.asarray(t, dtype=float)
        z = np.asarray(z, dtype=float)
        y = np.gradient(z, t) if y is None else np.asarray(y, dtype=float)
        terminal = Terminal(TerminalKind.REACHED_END, float(t[-1]), (float(z[-1]), float(y[-1])))
        return cls(t, np.column_stack([z, y]), terminal, tolerance_used)

    @property
    def z(self):
        return self.states[:, 0]

    @property
    def y(self):
        return self.states[:, 1]

    @property
    def forward(self):
        return self.t[-1] >= self.t[0]

    @property
    def span(self):
        return abs(self.t[-1] - self.t[0])

    @property
    def final_state(self):
        return self.states[-1]

    @property
    def blew_up(self):
        return self.terminal.kind is TerminalKind.BLOW_UP

    @property
    def samples(self):
        return [(float(t), float(z), float(y)) for t, (z, y) in zip(self.t, self.states)]

    def hits(self, name):
        return [hit for hit in self.events if hit.name == name]

    def state_at(self, t):
        if self.dense is not None:
            return self.dense(t)
        order = np.argsort(self.t)
        return np.array([np.interp(t, self.t[order], self.states[order, i]) for i in range(2)])

    def resample(self, n):
        """
        Evenly spaced samples of the dense interpolant, in run order.
        """
        t = np.linspace(self.t[0], self.t[-1], n)
        return t, np.asarray(self.state_at(t)).T

    def join(self, other):
        """
        Continue this trajectory with ``other``, which starts where this one ends.
        """
        segments = []
        for traj in (self, other):
            lo, hi = sorted((float(traj.t[0]), float(traj.t[-1])))
            fn = traj.dense if traj.dense is not None else traj.state_at
            if isinstance(fn, PiecewiseDense):
                segments.extend(fn.segments)
            else:
                segments.append((lo, hi, fn))
        return Trajectory(
            t=np.concatenate([self.t, other.t[1:]]),
            states=np.vstack([self.states, other.states[1:]]),
            terminal=other.terminal,
            tolerance_used=max(self.tolerance_used, other.tolerance_used),
            events=self.events + other.events,
            dense=PiecewiseDense(segments),
        )

    def to_rows(self):
        return self.samples
