"""
Adaptive Runge-Kutta integration of planar fields with event detection.
"""
import logging

import numpy as np
from scipy.integrate import solve_ivp

from apps.core.constants import ATOL_FACTOR, BLOWUP_THRESHOLD
from apps.core.exceptions import FitError, NumericError, StiffnessError
from apps.core.validators import validate_tolerance

from .models import EventHit, Terminal, TerminalKind, Trajectory

logger = logging.getLogger(__name__)

BLOWUP_EVENT = 'blow_up'


def _blowup_event(radius):
    def escaped(t, state):
        return radius - np.max(np.abs(state))
    escaped.terminal = True
    escaped.direction = -1
    return escaped


def integrate(field, state0, t0, t1, tol, events=(), escape_radius=BLOWUP_THRESHOLD, max_step=np.inf):
    """
    Integrate ``field(t, state)`` from t0 to t1 with the Dormand-Prince 5(4) pair.

    A descending span runs backward in time. Leaving the box
    max|state| <= escape_radius ends the run with a BlowUp terminal.
    """
    validate_tolerance(tol)
    state0 = np.asarray(state0, dtype=float)
    if not np.all(np.isfinite(field(t0, state0))):
        raise NumericError(f'Field is not finite at the initial state {state0.tolist()}.')

    scipy_events = [_blowup_event(escape_radius)] + [event.as_scipy_event() for event in events]
    try:
        sol = solve_ivp(
            field,
            (t0, t1),
            state0,
            method='RK45',
            rtol=tol,
            atol=tol * ATOL_FACTOR,
            dense_output=True,
            events=scipy_events,
            max_step=max_step,
        )
    except (ValueError, OverflowError, FloatingPointError) as e:
        logger.error(f"Integration from t={t0} failed: {e}")
        raise NumericError(f'Integration from t={t0} failed: {e}')

    if sol.status == -1:
        raise StiffnessError(f'Step size underflow near t={sol.t[-1]:.6g}: {sol.message}')
    states = sol.y.T
    if not np.all(np.isfinite(states)):
        raise NumericError(f'Non-finite state reached near t={sol.t[-1]:.6g}.')

    t_end = float(sol.t[-1])
    end_state = tuple(float(v) for v in states[-1])
    terminal = Terminal(TerminalKind.REACHED_END, t_end, end_state)
    hits = []
    for index, (times, values) in enumerate(zip(sol.t_events, sol.y_events)):
        name = BLOWUP_EVENT if index == 0 else events[index - 1].name
        for t_hit, state_hit in zip(times, values):
            if index > 0:
                hits.append(EventHit(name, float(t_hit), tuple(float(v) for v in state_hit)))
            if sol.status == 1 and t_hit == sol.t[-1]:
                kind = TerminalKind.BLOW_UP if index == 0 else TerminalKind.EVENT
                terminal = Terminal(kind, float(t_hit), tuple(float(v) for v in state_hit), name)
    hits.sort(key=lambda hit: hit.t if t1 >= t0 else -hit.t)

    if terminal.kind is TerminalKind.BLOW_UP:
        logger.debug(f"Blow-up at t={terminal.t:.6g} from {state0.tolist()}")
    return Trajectory(
        t=sol.t,
        states=states,
        terminal=terminal,
        tolerance_used=tol,
        events=tuple(hits),
        dense=sol.sol,
    )


def fit_decay_exponent(traj, window=0.2, n_points=200):
    """
    Least-squares slope of ln|z| against t over the trailing ``window``
    fraction of the trajectory's time span (largest t).
    """
    t_lo, t_hi = sorted((float(traj.t[0]), float(traj.t[-1])))
    start = t_hi - window * (t_hi - t_lo)
    if traj.dense is not None:
        t = np.linspace(start, t_hi, n_points)
        z = np.asarray(traj.state_at(t))[0]
    else:
        mask = traj.t >= start
        t, z = traj.t[mask], traj.z[mask]
    if t.size < 2:
        raise FitError(f'Decay window [{start:.4g}, {t_hi:.4g}] holds fewer than two samples.')
    if np.any(z == 0) or np.any(np.sign(z) != np.sign(z[0])):
        raise FitError(f'Tail on [{start:.4g}, {t_hi:.4g}] has zeros or sign changes.')
    slope, _ = np.polyfit(t, np.log(np.abs(z)), 1)
    return float(slope)
