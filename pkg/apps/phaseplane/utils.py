"""
Equilibria, spectra, classification and invariant manifolds of the planar
system, plus the boundary-set crossing certificates.
"""
import cmath
import logging
import math

import numpy as np

from apps.core.constants import (
    CONVERGENCE_BALL,
    CONVERGENCE_DWELL,
    DEFAULT_HORIZON,
    DEFAULT_TOL,
    MANIFOLD_OFFSET,
    MAX_MANIFOLD_OFFSET,
    MIN_MANIFOLD_OFFSET,
)
from apps.core.exceptions import DomainError, NonAutonomousError, NotSaddleError, PreconditionError
from apps.core.models import Boundary
from apps.core.utils import planar_field
from apps.core.validators import validate_nonlinear_order
from apps.integrate.models import Event
from apps.integrate.utils import integrate
from apps.transform.utils import build_profile

from .models import (
    Branch,
    CertificateReport,
    Classification,
    EntireConnection,
    Equilibrium,
    ManifoldTrace,
    Portrait,
    Verdict,
    VerdictKind,
)

logger = logging.getLogger(__name__)

ZERO_EIGENVALUE = 1e-14
# the return leg into the origin runs along the Navier line when m = mu_plus
CROSSING_EXCLUSION = 10 * CONVERGENCE_BALL
DWELL_STEP = 0.01
CONNECTION_TAIL = 12.0
CONNECTION_NODES = 4001


def jacobian_at(z_star, spec):
    co = spec.coefficients
    return np.array([[0.0, 1.0], [co.b0 - spec.k * co.alpha * z_star ** (spec.k - 1), co.b1]])


def _spectrum(jacobian):
    """
    Roots of mu^2 - b1 mu - c = 0 for the companion Jacobian [[0, 1], [c, b1]],
    largest real part first, with unit eigenvectors (1, mu) in the real case.
    """
    c, b1 = jacobian[1]
    disc = b1 ** 2 + 4 * c
    if disc >= 0:
        root = math.sqrt(disc)
        eigenvalues = (complex((b1 + root) / 2), complex((b1 - root) / 2))
        eigenvectors = tuple(
            (1 / math.hypot(1.0, mu.real), mu.real / math.hypot(1.0, mu.real)) for mu in eigenvalues
        )
        return eigenvalues, eigenvectors
    root = cmath.sqrt(disc)
    return ((b1 + root) / 2, (b1 - root) / 2), ()


def _classify_spectrum(eigenvalues):
    first, second = eigenvalues
    scale = 1.0 + abs(first) + abs(second)
    if first.imag == 0:
        if min(abs(first.real), abs(second.real)) <= ZERO_EIGENVALUE * scale:
            return Classification.DEGENERATE
        if first.real * second.real < 0:
            return Classification.SADDLE
        return Classification.SOURCE_NODE if first.real > 0 else Classification.SINK_NODE
    if abs(first.real) <= ZERO_EIGENVALUE * scale:
        return Classification.CENTER
    return Classification.SOURCE_FOCUS if first.real > 0 else Classification.SINK_FOCUS


def classify(eq, spec=None):
    """
    Sign and realness taxonomy of the equilibrium's spectrum.
    """
    return _classify_spectrum(eq.eigenvalues)


def make_equilibrium(z_star, spec):
    jacobian = jacobian_at(z_star, spec)
    eigenvalues, eigenvectors = _spectrum(jacobian)
    return Equilibrium(
        point=(float(z_star), 0.0),
        jacobian=jacobian,
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        classification=_classify_spectrum(eigenvalues),
    )


def equilibria(spec):
    """
    Fixed points of the unforced system: the origin and the nonzero roots of
    b0 z = alpha z^k.
    """
    if not spec.is_autonomous:
        raise NonAutonomousError(f'Equilibria need lambda = 0, got lambda={spec.lam}.')
    validate_nonlinear_order(spec.k)
    co = spec.coefficients
    levels = [0.0]
    if co.b0 > 0:
        if spec.k == 2:
            levels.append(co.b0 / co.alpha)
        else:
            level = math.sqrt(co.b0 / co.alpha)
            levels.extend([level, -level])
    return [make_equilibrium(z_star, spec) for z_star in levels]


def conserved_V(z, y):
    """First integral of the undamped N = 4, k = 2 system."""
    return y ** 2 / 2 - 2 * z ** 2 + z ** 3 / 2


def _manifold_direction(eq, branch):
    if not eq.is_real:
        raise NotSaddleError(f'Equilibrium {eq.point} has complex eigenvalues {eq.eigenvalues}.')
    (mu_big, mu_small), (v_big, v_small) = eq.eigenvalues, eq.eigenvectors
    if branch.stable:
        mu, other, vector = mu_small.real, mu_big.real, v_small
        ok = mu < -ZERO_EIGENVALUE and other >= 0
    else:
        mu, other, vector = mu_big.real, mu_small.real, v_big
        ok = mu > ZERO_EIGENVALUE and other <= 0
    if not ok:
        raise NotSaddleError(
            f'No one-dimensional {branch.value} manifold at {eq.point} (eigenvalues {mu_big.real:g}, {mu_small.real:g}).'
        )
    return mu, np.array(vector)


def _dwell_target(traj, eq, others):
    """
    Other equilibrium whose convergence ball the trajectory enters and keeps
    for at least the dwell time, if any.
    """
    n = max(2, int(traj.span / DWELL_STEP) + 1)
    times, states = traj.resample(n)
    dt = abs(times[1] - times[0])
    for other in others:
        inside = np.linalg.norm(states - np.array(other.point), axis=1) < CONVERGENCE_BALL
        run = best = 0
        for flag in inside:
            run = run + 1 if flag else 0
            best = max(best, run)
        if (best - 1) * dt >= CONVERGENCE_DWELL:
            return other
    return None


def _verdict(traj, eq, others, crossings):
    if traj.terminal.name == 'return':
        return Verdict(VerdictKind.HOMOCLINIC, eq.point)
    target = _dwell_target(traj, eq, others)
    if target is not None:
        return Verdict(VerdictKind.HETEROCLINIC, target.point)
    if traj.blew_up:
        return Verdict(VerdictKind.UNBOUNDED)
    if crossings:
        first = crossings[0]
        kind = VerdictKind.AXIS_CROSSING if first.name == 'axis' else VerdictKind.LINE_CROSSING
        return Verdict(kind, first.state)
    return Verdict(VerdictKind.BOUNDED)


def _crossing_events(spec, crossings):
    slope = spec.navier_slope
    events = []
    if 'axis' in crossings:
        events.append(Event('axis', lambda t, s: s[0]))
    if 'line' in crossings:
        events.append(Event('line', lambda t, s: s[1] - slope * s[0]))
    return events


def _trace(eq, branch, spec, horizon, offset, tol, crossings, others):
    mu, vector = _manifold_direction(eq, branch)
    center = np.array(eq.point)
    seed = center + branch.side * offset * vector
    t_end = -horizon if branch.stable else horizon
    field = planar_field(spec)
    crossing_events = _crossing_events(spec, crossings)

    leave = Event('leave', lambda t, s: np.linalg.norm(s - center) - CONVERGENCE_BALL, terminal=True, direction=1)
    traj = integrate(field, seed, 0.0, t_end, tol, events=[leave] + crossing_events)
    if traj.terminal.name == 'leave':
        back = Event('return', lambda t, s: np.linalg.norm(s - center) - CONVERGENCE_BALL, terminal=True, direction=-1)
        peak = Event('peak', lambda t, s: s[1])
        rest = integrate(field, traj.final_state, traj.terminal.t, t_end, tol, events=[back, peak] + crossing_events)
        traj = traj.join(rest)

    hits = tuple(
        hit for hit in traj.events
        if hit.name in ('axis', 'line') and np.linalg.norm(np.array(hit.state) - center) >= CROSSING_EXCLUSION
    )
    peaks = tuple(hit for hit in traj.events if hit.name == 'peak')
    verdict = _verdict(traj, eq, others, hits)
    return ManifoldTrace(branch, offset, traj, verdict, eq, hits, peaks)


def trace_manifold(eq, branch, spec, horizon=DEFAULT_HORIZON, offset=MANIFOLD_OFFSET, tol=DEFAULT_TOL,
                   crossings=('axis', 'line'), richardson=True):
    """
    Trace one branch of the one-dimensional stable or unstable manifold of ``eq``.

    The seed sits at eq + side * offset * eigenvector. Stable branches run
    backward in time and unstable ones forward. The verdict takes the first
    fate that applies: a return to eq (Homoclinic), a dwell in another
    equilibrium's convergence ball (Heteroclinic), blow-up (Unbounded), the
    first boundary-set crossing, or Bounded.
    """
    if not spec.is_autonomous:
        raise NonAutonomousError(f'Manifold traces need lambda = 0, got lambda={spec.lam}.')
    if not MIN_MANIFOLD_OFFSET <= offset <= MAX_MANIFOLD_OFFSET:
        raise DomainError(f'Seed offset must lie in [1e-8, 1e-4], got {offset:g}.', code='offset')
    branch = Branch(branch)
    others = [other for other in equilibria(spec) if other.point != eq.point]

    trace = _trace(eq, branch, spec, horizon, offset, tol, crossings, others)
    if richardson:
        check = _trace(eq, branch, spec, horizon, offset / 2, tol, crossings, others)
        stable = check.verdict.kind == trace.verdict.kind
        if trace.verdict.kind is VerdictKind.HETEROCLINIC:
            stable = stable and check.verdict.point == trace.verdict.point
        if not stable:
            logger.warning(
                f"Verdict of {branch.value} trace at {eq.point} changed under offset halving: "
                f"{trace.verdict.kind.value} -> {check.verdict.kind.value}"
            )
        trace = ManifoldTrace(
            trace.branch, trace.offset, trace.trajectory, trace.verdict, trace.equilibrium,
            trace.crossings, trace.peaks, stable,
        )
    logger.debug(f"{branch.value} trace at {eq.point}: {trace.verdict.kind.value}")
    return trace


def origin(spec):
    return make_equilibrium(0.0, spec)


def nonexistence_certificate(spec, horizon=DEFAULT_HORIZON, tol=DEFAULT_TOL):
    """
    Trace both stable branches of the origin and collect every crossing of the
    Dirichlet set {z = 0} and the Navier set {y = m z} away from the origin.
    """
    validate_nonlinear_order(spec.k)
    eq = origin(spec)
    traces = tuple(
        trace_manifold(eq, branch, spec, horizon=horizon, tol=tol)
        for branch in (Branch.STABLE_RIGHT, Branch.STABLE_LEFT)
    )
    dirichlet = tuple(hit.state for trace in traces for hit in trace.crossings if hit.name == 'axis')
    navier = tuple(hit.state for trace in traces for hit in trace.crossings if hit.name == 'line')
    report = CertificateReport(dirichlet, navier, traces)
    logger.info(
        f"Certificate k={spec.k} N={spec.N}: {report.verdict} "
        f"({len(dirichlet)} Dirichlet, {len(navier)} Navier crossings)"
    )
    return report


def portrait(spec, horizon=DEFAULT_HORIZON, tol=DEFAULT_TOL):
    """
    Equilibria with every one-dimensional manifold branch they carry.
    """
    points = equilibria(spec)
    traces = []
    for eq in points:
        for branch in Branch:
            try:
                traces.append(trace_manifold(eq, branch, spec, horizon=horizon, tol=tol))
            except NotSaddleError:
                continue
    return Portrait(tuple(points), tuple(traces))


def entire_connection(spec, horizon=DEFAULT_HORIZON, tol=DEFAULT_TOL, nodes=CONNECTION_NODES):
    """
    Nontrivial entire solution for lambda = 0 from the right stable branch of
    the origin, traced backward: a homoclinic loop for N = 4 and a
    heteroclinic connection out of the positive equilibrium for N > 4.

    The trace is extended on the linear modes of the origin, decaying past
    the seed and growing before a homoclinic return, and sampled on a uniform
    grid. Homoclinic profiles are shifted so that the peak of z sits at t = 0,
    which puts u on 8 / (1 + r^2) for N = 4. Heteroclinic u grows like a
    logarithm at infinity and is pinned to zero at r = 1.
    """
    if spec.boundary is not Boundary.ENTIRE:
        raise DomainError('Connections solve the entire problem.', code='connection_boundary')
    co = spec.coefficients
    trace = trace_manifold(origin(spec), Branch.STABLE_RIGHT, spec, horizon=horizon, tol=tol)
    kind = trace.verdict.kind
    if kind not in (VerdictKind.HOMOCLINIC, VerdictKind.HETEROCLINIC):
        raise PreconditionError(
            f'No nontrivial entire solution for k={spec.k}, N={spec.N}: the stable manifold is {kind.value}.'
        )
    if kind is VerdictKind.HETEROCLINIC and co.gamma <= 0:
        raise PreconditionError(
            f'Heteroclinic limit {trace.verdict.point} gives w = e^(gamma t) z without decay at t -> -inf '
            f'for k={spec.k}.'
        )

    traj = trace.trajectory
    t_far = float(traj.t[-1])
    lo = t_far - CONNECTION_TAIL if kind is VerdictKind.HOMOCLINIC else t_far
    t = np.linspace(lo, CONNECTION_TAIL, nodes)
    z = np.empty_like(t)
    ahead, behind = t > 0.0, t < t_far
    inside = ~(ahead | behind)
    z[inside] = np.asarray(traj.state_at(t[inside]))[0]
    z[ahead] = traj.states[0, 0] * np.exp(co.mu_minus * t[ahead])
    z[behind] = traj.final_state[0] * np.exp(co.mu_plus * (t[behind] - t_far))

    if kind is VerdictKind.HOMOCLINIC:
        shift = max(trace.peaks, key=lambda hit: hit.state[0]).t if trace.peaks else 0.0
        anchor = None
    else:
        shift, anchor = 0.0, 0.0
    profile = build_profile(t - shift, z, spec, anchor=anchor)
    logger.info(
        f"Entire {kind.value} solution N={spec.N}: max z {profile.sup_norm:.6g}, t in [{t[0] - shift:.4g}, {t[-1] - shift:.4g}]"
    )
    return EntireConnection(trace, profile, float(shift), anchor)
