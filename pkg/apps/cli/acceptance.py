"""
Acceptance suite behind the ``verify`` command.

Each check returns ``(passed, detail)``; an exception inside a check fails it
with the message recorded.
"""
import logging
import math
import time

import numpy as np

from apps.branch.utils import continue_branch, kernel_check, newton_solve
from apps.core.models import Boundary, Datum, ProblemSpec
from apps.core.utils import planar_field
from apps.greens.utils import monotone_solve, nonexistence_threshold, sharpness_demo
from apps.integrate.utils import fit_decay_exponent
from apps.phaseplane.models import Branch, VerdictKind
from apps.phaseplane.utils import conserved_V, nonexistence_certificate, origin, trace_manifold
from apps.shoot.utils import solve
from apps.transform.utils import build_profile

from .models import CheckResult

logger = logging.getLogger(__name__)

CHECKS = {}
FULL_WINDOW = (-10.0, 10.0)
FULL_SAMPLES = 2001
HALF_LINES = (Boundary.DIRICHLET, Boundary.NAVIER)


def check(name):
    def register(fn):
        CHECKS[name] = fn
        return fn
    return register


def _forced(lam, N, boundary=Boundary.DIRICHLET):
    return ProblemSpec(2, N, lam=lam, boundary=boundary, datum=Datum.power_law(1.0, max(N - 3, 0)))


@check('explicit_solution')
def explicit_solution(workers):
    t0 = 0.5
    t = np.linspace(t0 - 10, t0 + 10, 501)
    f = 1 / np.cosh(t - t0) ** 2
    z, z_dd = 4 * f, 16 * f - 24 * f ** 2
    residual = float(np.max(np.abs(-z_dd + 4 * z - 1.5 * z ** 2)))

    spec = ProblemSpec(2, 4, boundary=Boundary.ENTIRE)
    t = np.linspace(-25.0, 25.0, 4001)
    r = np.linspace(0.05, 10.0, 300)
    errors = {}
    for alpha in (1.0, 2.0):
        x = np.exp(2 * t) / alpha
        profile = build_profile(t, 16 * x / (1 + x) ** 2, spec)
        errors[alpha] = float(np.max(np.abs(profile.u_at(r) - 8 / (1 + alpha * r ** 2))))
    passed = residual < 1e-12 and max(errors.values()) < 1e-6
    return passed, {'t0': t0, 'residual': residual, 'u_errors': errors}


@check('conservation')
def conservation(workers):
    spec = ProblemSpec(2, 4)
    traj = trace_manifold(origin(spec), Branch.STABLE_RIGHT, spec, horizon=30.0, tol=1e-10).trajectory
    energy = conserved_V(traj.z, traj.y)
    drift = float(np.max(np.abs(energy - energy[0])))
    return drift < 1e-7, {'drift': drift}


@check('spectral_data')
def spectral_data(workers):
    worst = 0.0
    for N in range(2, 15):
        eigenvalues = origin(ProblemSpec(2, N)).eigenvalues
        worst = max(worst, abs(eigenvalues[0] - (N - 2)), abs(eigenvalues[1] + 2))
    z, y = origin(ProblemSpec(2, 4)).eigenvectors[1]
    parallel = abs(y + 2 * z)
    return worst < 1e-13 and parallel < 1e-12, {'eigenvalue_error': worst, 'direction_error': parallel}


@check('heteroclinic')
def heteroclinic(workers):
    spec = ProblemSpec(2, 5)
    trace = trace_manifold(origin(spec), Branch.STABLE_RIGHT, spec)
    distance = float(np.linalg.norm(trace.trajectory.final_state - np.array([3.0, 0.0])))
    exponent = fit_decay_exponent(trace.trajectory, window=0.1)
    passed = trace.verdict.kind is VerdictKind.HETEROCLINIC and distance < 1e-3 and abs(exponent + 2) < 0.05
    return passed, {'verdict': trace.verdict.as_dict(), 'distance': distance, 'decay_exponent': exponent}


@check('nonexistence_certificates')
def nonexistence_certificates(workers):
    detail, passed = {}, True
    for N in (4, 5, 6):
        report = nonexistence_certificate(ProblemSpec(2, N))
        roots = {
            boundary.value: solve(ProblemSpec(2, N, boundary=boundary), s_window=FULL_WINDOW,
                                  n_samples=FULL_SAMPLES, workers=workers).root_values
            for boundary in HALF_LINES
        }
        detail[N] = {'certificate': report.verdict, 'roots': roots}
        passed &= report.verdict == 'no_crossings' and all(values == [0.0] for values in roots.values())
    low = solve(ProblemSpec(2, 3), s_window=FULL_WINDOW, n_samples=FULL_SAMPLES, workers=workers).root_values
    detail[3] = {'roots': low}
    return passed and any(s != 0.0 for s in low), detail


@check('entire_nonexistence')
def entire_nonexistence(workers):
    detail = {}
    for N in (2, 3):
        spec = ProblemSpec(2, N)
        detail[N] = [
            trace_manifold(origin(spec), branch, spec, richardson=False).trajectory.blew_up
            for branch in (Branch.STABLE_RIGHT, Branch.STABLE_LEFT)
        ]
    return all(all(flags) for flags in detail.values()), detail


@check('small_lambda_branch')
def small_lambda_branch(workers):
    detail, passed = {}, True
    for N in (2, 4, 5):
        for sign in (1.0, -1.0):
            full = newton_solve(_forced(sign * 0.01, N))
            half = newton_solve(_forced(sign * 0.005, N))
            ratio = full.sup_norm / half.sup_norm
            detail[f'{N}{"+" if sign > 0 else "-"}'] = {'residual': full.residual, 'ratio': ratio}
            passed &= full.residual < 1e-9 and 1.8 <= ratio <= 2.2
    # N = 2 has mu_plus = 0: no growing mode to shoot on
    for N in (4, 5):
        spec = _forced(0.01, N)
        profile = solve(spec, s_window=(-2.0, 2.0), n_samples=201, workers=workers).roots[0].profile
        point = newton_solve(spec, t_grid=profile.t_grid)
        gap = float(np.max(np.abs(point.solution - profile.z_values)))
        detail[f'shoot_vs_branch_{N}'] = gap
        passed &= gap < 1e-6
    return passed, detail


@check('monotone_iteration')
def monotone_iteration(workers):
    spec = _forced(-1.0, 4)
    result = monotone_solve(spec)
    passed = result.iterates <= 200 and result.residual < 1e-8 and float(np.max(result.solution)) <= 0.0
    return passed, result.as_dict()


@check('threshold_consistency')
def threshold_consistency(workers):
    datum = Datum.power_law(1.0, 1.0)
    report = nonexistence_threshold(datum, 4, Boundary.DIRICHLET)
    doubled = nonexistence_threshold(datum.scaled(2.0), 4, Boundary.DIRICHLET)
    fold = continue_branch(_forced(0.0, 4), lambda_step=2.0).report
    scaling = abs(doubled.lambda_bar * 2 / report.lambda_bar - 1)
    passed = (
        report.quadrature_error_estimate < 1e-6 * report.lambda_bar
        and scaling < 1e-6
        and fold.fold_lambda is not None
        and 0 < fold.fold_lambda <= report.lambda_bar
    )
    return passed, {'threshold': report.as_dict(), 'scaling_error': scaling, 'fold': fold.as_dict()}


@check('sharpness')
def sharpness(workers):
    critical = sharpness_demo(4, f2=lambda s: math.exp(-s) if s >= 0 else 0.0)
    control = sharpness_demo(4, f2=lambda s: math.exp(-3 * s) if s >= 0 else 0.0, control=True)
    strong = sharpness_demo(5, datum=Datum.power_law(1.0, 0.0))
    entire = max(critical.for_boundary(Boundary.ENTIRE), key=lambda row: row.T)
    strong_last = min(
        max(strong.for_boundary(boundary), key=lambda row: row.T).weighted for boundary in Boundary
    )
    passed = (
        critical.violation
        and abs(entire.weighted - 1 / 3) < 1e-6
        and not control.violation
        and strong_last > 1e3
    )
    return passed, {'critical': critical.as_dict(), 'control': control.as_dict(), 'strong': strong.as_dict()}


@check('cubic_certificate')
def cubic_certificate(workers):
    detail, passed = {}, True
    for N in (3, 4, 5):
        spec = ProblemSpec(3, N)
        report = nonexistence_certificate(spec)
        roots = {
            boundary.value: solve(spec.with_boundary(boundary), s_window=FULL_WINDOW,
                                  n_samples=FULL_SAMPLES, workers=workers).root_values
            for boundary in HALF_LINES
        }
        field = planar_field(spec)
        states = np.random.default_rng(N).uniform(-3, 3, size=(50, 2))
        oddness = max(float(np.max(np.abs(field(0.0, s) + field(0.0, -s)))) for s in states)
        detail[N] = {'certificate': report.verdict, 'roots': roots, 'oddness': oddness}
        passed &= report.verdict == 'no_crossings' and oddness < 1e-9
        passed &= all(values == [0.0] for values in roots.values())
    return passed, detail


@check('kernel_report')
def kernel_report(workers):
    reports = [kernel_check(t0) for t0 in (0.0, 1.0)]
    passed = all(report.translation_mode_residual < 1e-8 for report in reports)
    return passed, {str(report.t0): report.as_dict() for report in reports}


def run_checks(names=None, workers=None):
    results = []
    for name in names or CHECKS:
        started = time.perf_counter()
        try:
            passed, detail = CHECKS[name](workers)
            result = CheckResult(name, bool(passed), detail)
        except Exception as e:
            logger.exception(f"Check {name} raised")
            result = CheckResult(name, False, error=f'{type(e).__name__}: {e}')
        result.seconds = time.perf_counter() - started
        logger.info(f"Check {name}: {'pass' if result.passed else 'FAIL'} in {result.seconds:.1f}s")
        results.append(result)
    return results


def format_table(results):
    width = max(len(result.name) for result in results)
    lines = [f"{'check'.ljust(width)}  result  seconds"]
    for result in results:
        verdict = 'pass' if result.passed else 'FAIL'
        lines.append(f'{result.name.ljust(width)}  {verdict:<6}  {result.seconds:7.1f}')
    passed = sum(result.passed for result in results)
    lines.append(f'{passed}/{len(results)} passed')
    return '\n'.join(lines) + '\n'
