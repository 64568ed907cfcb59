"""
Shooting on the truncated half-line with growing-mode mismatch.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import partial

import numpy as np
from django.conf import settings

from apps.core.constants import (
    BISECTION_WIDTH,
    MIN_SAMPLES,
    MIN_TRUNCATION,
    ROOT_MERGE,
    ROOT_TOL,
    SCAN_TOL,
    SHOOT_ARM_RADIUS,
    SHOOT_ESCAPE_RADIUS,
)
from apps.core.exceptions import DomainError
from apps.core.models import Boundary
from apps.core.utils import forcing_F, planar_field
from apps.core.validators import validate_nonlinear_order, validate_tolerance
from apps.greens.models import GreenKernel
from apps.greens.utils import apply_kernel
from apps.integrate.models import Event, TerminalKind
from apps.integrate.utils import integrate
from apps.transform.utils import build_profile

from .models import RootRecord, ShootingResult, ShotRecord

logger = logging.getLogger(__name__)

PROFILE_NODES = 4001
APPROACH_STEP = 0.005
TAIL_MAX_ITER = 100
TAIL_TOL = 1e-13


def start_state(s, spec):
    """
    Initial state carrying the t = 0 boundary row: (0, s) for Dirichlet,
    (s, m s) for Navier.
    """
    if spec.boundary is Boundary.DIRICHLET:
        return np.array([0.0, s])
    if spec.boundary is Boundary.NAVIER:
        return np.array([s, spec.navier_slope * s])
    raise DomainError('Shooting covers the half-line problems; solve entire problems with newton_solve.',
                      code='entire_shooting')


def growth_coefficient(state, co):
    """Coefficient a of (1, mu_plus) in the eigenbasis decomposition of the state."""
    return (state[1] - co.mu_minus * state[0]) / (co.mu_plus - co.mu_minus)


def _arm_distance(t, state):
    return math.hypot(state[0], state[1]) - SHOOT_ARM_RADIUS


def _radial_rate(field):
    """d/dt of |x|^2 / 2 along the field; it turns positive at a local minimum of the norm."""
    def rate(t, state):
        dz, dy = field(t, state)
        return state[0] * dz + state[1] * dy
    return rate


def _first_minimum(traj, state0, rate):
    if rate(traj.t[0], state0) >= 0.0:
        return state0
    turns = traj.hits('turn')
    return np.asarray(turns[0].state) if turns else traj.final_state


def _shoot(s, spec, T, tol):
    """
    Integrate from the boundary state. Orbits that enter the arm ball around
    the origin are read off on leaving it again (departure) or at T (end).
    Orbits that never enter it take the sign of the growing-mode coefficient
    at their first closest approach to the origin (miss).
    """
    field = planar_field(spec)
    state = start_state(s, spec)
    armed = math.hypot(state[0], state[1]) <= SHOOT_ARM_RADIUS
    traj = None
    if not armed:
        enter = Event('arm', _arm_distance, terminal=True, direction=-1)
        turn = Event('turn', _radial_rate(field), direction=1)
        traj = integrate(field, state, 0.0, T, tol, events=[enter, turn], escape_radius=SHOOT_ESCAPE_RADIUS)
        armed = traj.terminal.name == 'arm'
        if not armed:
            a = growth_coefficient(_first_minimum(traj, state, _radial_rate(field)), spec.coefficients)
            return ShotRecord(s, math.copysign(math.inf, a), 'miss', False), traj
    if traj is None or traj.terminal.t < T:
        t_start = 0.0 if traj is None else traj.terminal.t
        state_start = state if traj is None else traj.final_state
        depart = Event('depart', _arm_distance, terminal=True, direction=1)
        rest = integrate(field, state_start, t_start, T, tol, events=[depart], escape_radius=SHOOT_ESCAPE_RADIUS)
        traj = rest if traj is None else traj.join(rest)

    a = growth_coefficient(traj.final_state, spec.coefficients)
    if traj.terminal.kind is TerminalKind.BLOW_UP:
        shot = ShotRecord(s, math.copysign(math.inf, a), 'escape', True)
    elif traj.terminal.name == 'depart':
        shot = ShotRecord(s, math.copysign(math.inf, a), 'departure', True)
    else:
        shot = ShotRecord(s, float(a), 'end', True)
    return shot, traj


def _validate(spec, T, tol):
    validate_nonlinear_order(spec.k)
    validate_tolerance(tol)
    if T < MIN_TRUNCATION:
        raise DomainError(f'Truncation T must be at least {MIN_TRUNCATION:g}, got {T:g}.', code='truncation')
    start_state(0.0, spec)


def mismatch(s, spec, T, tol=SCAN_TOL):
    """
    Growing-mode coefficient at the end of the run: a(T) for orbits that stay
    near the decaying subspace, signed infinity for departures, escapes and
    misses.
    """
    _validate(spec, T, tol)
    return _shoot(s, spec, T, tol)[0].mismatch


def shot(s, spec, T, tol=SCAN_TOL):
    return _shoot(s, spec, T, tol)[0]


def _bisect(lo, hi, m_lo, spec, T, tol):
    while hi - lo > BISECTION_WIDTH:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        m_mid = _shoot(mid, spec, T, tol)[0].mismatch
        if m_mid == 0.0:
            return mid
        if math.copysign(1.0, m_mid) == math.copysign(1.0, m_lo):
            lo, m_lo = mid, m_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _decaying_tail(z_c, tau, t_c, spec):
    """
    Solution of the z-equation on [t_c, t_c + tau[-1]] with z(t_c) = z_c and
    no growing mode, by fixed-point iteration on the Dirichlet kernel.
    """
    co = spec.coefficients
    kernel = GreenKernel.for_operator(co.b1, co.b0, Boundary.DIRICHLET)
    forcing = spec.lam * forcing_F(t_c + tau, spec) if spec.lam != 0.0 else np.zeros_like(tau)
    free = z_c * np.exp(co.mu_minus * tau)
    z = free
    for _ in range(TAIL_MAX_ITER):
        update = free + apply_kernel(kernel, co.alpha * z ** spec.k + forcing, tau)
        if not np.all(np.isfinite(update)):
            logger.warning(f"Tail iteration diverged after t={t_c:.4g}; continuing on the decaying mode")
            return free
        step = float(np.max(np.abs(update - z)))
        z = update
        if step <= TAIL_TOL * max(1.0, float(np.max(np.abs(z)))):
            break
    else:
        logger.warning(f"Tail iteration stopped after {TAIL_MAX_ITER} sweeps with step {step:.3g}")
    return z


def _root_profile(traj, t_c, spec, T, nodes):
    """
    The orbit up to its closest approach t_c, continued by the decaying
    solution of the full equation.
    """
    t = np.linspace(0.0, T, nodes)
    i_c = int(np.searchsorted(t, t_c, side='right')) - 1
    z = np.asarray(traj.state_at(t[:i_c + 1]))[0]
    if t.size - i_c >= 5:
        tail = _decaying_tail(z[-1], t[i_c:] - t[i_c], t[i_c], spec)
        z = np.concatenate([z, tail[1:]])
    else:
        z = np.asarray(traj.state_at(t))[0]
    return build_profile(t, z, spec)


def accept_root(s, spec, T, tol=SCAN_TOL, nodes=PROFILE_NODES):
    """
    Re-integrate a bisection limit and keep it when the growing-mode
    coefficient at the closest approach to the origin, relative to the
    largest state before it (floored at 1), is below ROOT_TOL.
    """
    _, traj = _shoot(s, spec, T, tol)
    n = max(2, int(abs(traj.terminal.t) / APPROACH_STEP) + 1)
    times, states = traj.resample(n)
    norms = np.hypot(states[:, 0], states[:, 1])
    i = int(np.argmin(norms))
    scale = max(1.0, float(np.max(norms[:i + 1])))
    residual = abs(growth_coefficient(states[i], spec.coefficients)) / scale
    if residual >= ROOT_TOL:
        logger.warning(f"Rejected bracket limit s={s:.12g}: residual {residual:.3g} at closest approach t={times[i]:.4g}")
        return None
    profile = _root_profile(traj, times[i], spec, T, nodes)
    return RootRecord(float(s), profile, float(residual))


def _brackets(scan):
    for left, right in zip(scan, scan[1:]):
        if left.mismatch == 0.0 or right.mismatch == 0.0:
            continue
        if math.copysign(1.0, left.mismatch) == math.copysign(1.0, right.mismatch):
            continue
        if not (left.approached or right.approached):
            logger.info(f"Skipping bracket [{left.s:.6g}, {right.s:.6g}]: neither orbit entered the arm ball")
            continue
        yield left, right


def _merge(roots):
    merged = []
    for root in sorted(roots, key=lambda r: r.s):
        if merged and abs(root.s - merged[-1].s) < ROOT_MERGE:
            if root.residual < merged[-1].residual:
                merged[-1] = root
            continue
        merged.append(root)
    return tuple(merged)


def scan_window(s_window, n_samples):
    lo, hi = s_window
    values = np.linspace(lo, hi, n_samples)
    if lo < 0 < hi:
        nearest = int(np.argmin(np.abs(values)))
        if abs(values[nearest]) < 1e-12:
            values[nearest] = 0.0
    return values


def scan(spec, T, s_window, n_samples, tol=SCAN_TOL, workers=None):
    """
    Mismatch samples over the window, computed on a thread pool.
    """
    _validate(spec, T, tol)
    if n_samples < MIN_SAMPLES:
        raise DomainError(f'Scans need at least {MIN_SAMPLES} samples, got {n_samples}.', code='samples')
    if workers is None:
        workers = getattr(settings, 'KHESSIAN_SETTINGS', {}).get('THREADS', 1)
    values = scan_window(s_window, n_samples)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return tuple(pool.map(partial(shot, spec=spec, T=T, tol=tol), values))


def solve(spec, T=25.0, s_window=(-10.0, 10.0), n_samples=2001, tol=SCAN_TOL, workers=None, nodes=PROFILE_NODES):
    """
    Scan the mismatch, bisect every admissible sign change to BISECTION_WIDTH
    and keep the limits that pass the closest-approach check.
    """
    samples = scan(spec, T, s_window, n_samples, tol=tol, workers=workers)
    candidates = [sample.s for sample in samples if abs(sample.mismatch) < ROOT_TOL]
    for left, right in _brackets(samples):
        candidates.append(_bisect(left.s, right.s, left.mismatch, spec, T, tol))

    roots = [root for root in (accept_root(s, spec, T, tol, nodes) for s in candidates) if root is not None]
    result = ShootingResult(_merge(roots), samples, float(T))
    if not result.roots:
        logger.info(f"No roots in window {tuple(s_window)} for N={spec.N}, k={spec.k}, lambda={spec.lam}")
    else:
        logger.info(f"Roots for N={spec.N}, k={spec.k}, lambda={spec.lam}: {result.root_values}")
    return result
