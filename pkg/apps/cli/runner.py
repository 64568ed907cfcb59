"""
Run a RunConfig: dispatch to the solver apps, write CSV/JSON artifacts and
the run manifest into ``<out>/<command>-<digest>``.
"""
import csv
import json
import logging
import platform
import time
from enum import Enum
from pathlib import Path

import django
import numpy as np
import scipy
from django.core.serializers.json import DjangoJSONEncoder
from django.utils import timezone

import khessian
from apps.branch.utils import continue_branch, newton_solve
from apps.core import constants
from apps.core.exceptions import ConvergenceError, KHessianError, PreconditionError
from apps.core.models import Boundary
from apps.greens.utils import default_grid, monotone_solve, nonexistence_threshold
from apps.phaseplane.utils import entire_connection, origin, portrait, trace_manifold
from apps.shoot.utils import scan, solve
from apps.transform.utils import build_profile

from .models import Command, OutputFormat, RunOutcome

logger = logging.getLogger(__name__)

PROFILE_HEADER = ('t', 'z', 'w', 'r', 'u')
TRAJECTORY_HEADER = ('t', 'z', 'y')
SCAN_HEADER = ('s', 'mismatch', 'terminal', 'approached')
BRANCH_HEADER = ('lambda', 'sup_norm', 'newton_iterations', 'residual')

HANDLERS = {}


def handler(command):
    def register(fn):
        HANDLERS[Command(command)] = fn
        return fn
    return register


class ArtifactEncoder(DjangoJSONEncoder):
    """JSON encoder aware of numpy scalars, arrays and str enums."""

    def default(self, o):
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, Enum):
            return o.value
        if isinstance(o, (set, frozenset)):
            return sorted(o)
        return super().default(o)


class ArtifactWriter:
    """
    Writes artifacts into one run directory, honouring the requested formats.
    """

    def __init__(self, directory, formats):
        self.directory = Path(directory)
        self.formats = formats
        self.artifacts = []

    def csv(self, name, header, rows):
        if OutputFormat.CSV not in self.formats:
            return
        path = self.directory / name
        with open(path, 'w', newline='') as fh:
            writer = csv.writer(fh, lineterminator='\n')
            writer.writerow(header)
            writer.writerows(rows)
        self.artifacts.append(name)

    def json(self, name, data):
        if OutputFormat.JSON not in self.formats:
            return
        write_json(self.directory / name, data)
        self.artifacts.append(name)


def write_json(path, data):
    with open(path, 'w') as fh:
        json.dump(data, fh, cls=ArtifactEncoder, indent=2, sort_keys=True)
        fh.write('\n')


def versions():
    return {
        'python': platform.python_version(),
        'numpy': np.__version__,
        'scipy': scipy.__version__,
        'django': django.get_version(),
        'khessian': khessian.__version__,
    }


def tolerances(config):
    return {
        'tol': config.numeric.tol,
        'scan_tol': constants.SCAN_TOL,
        'blowup_threshold': constants.BLOWUP_THRESHOLD,
        'bisection_width': constants.BISECTION_WIDTH,
        'root_tol': constants.ROOT_TOL,
        'newton_step_tol': constants.NEWTON_STEP_TOL,
        'newton_residual_tol': constants.NEWTON_RESIDUAL_TOL,
        'monotone_tol': constants.MONOTONE_TOL,
    }


def run(config, stdout=None):
    """
    Execute ``config`` and write its manifest. Returns a RunOutcome whose
    status is 0 on success, 2 when a solver reports non-convergence and 1 for
    every other failure. OSError from creating the run directory propagates.
    """
    directory = Path(config.output.directory) / config.run_name
    directory.mkdir(parents=True, exist_ok=True)
    logger.info(f"Run {config.command.value} into {directory}")

    writer = ArtifactWriter(directory, config.output.formats)
    started = timezone.now()
    clock = time.perf_counter()
    outcome = RunOutcome(0, directory)
    try:
        status = HANDLERS[config.command](config, writer, stdout)
        outcome.status = status or 0
    except ConvergenceError as e:
        logger.error(f"{config.command.value} did not converge: {e}")
        outcome.status, outcome.error = 2, str(e)
    except KHessianError as e:
        logger.error(f"{config.command.value} failed: {e}")
        outcome.status, outcome.error = 1, str(e)
    outcome.artifacts = list(writer.artifacts)

    manifest = {
        'config': config.as_dict(),
        'versions': versions(),
        'started_at': started.isoformat(),
        'wall_time': time.perf_counter() - clock,
        'tolerances': tolerances(config),
        'artifacts': outcome.artifacts,
        'status': outcome.status,
        'error': outcome.error,
    }
    write_json(directory / 'manifest.json', manifest)
    return outcome


def _entire_solution(config):
    spec, numeric = config.spec, config.numeric
    if spec.lam < 0:
        t = default_grid(Boundary.ENTIRE, numeric.T, numeric.grid_nodes)
        result = monotone_solve(spec, t_grid=t)
        return result.profile(spec), result.as_dict()
    if spec.lam == 0:
        try:
            connection = entire_connection(spec, horizon=numeric.horizon, tol=numeric.tol, nodes=numeric.grid_nodes)
            return connection.profile, connection.as_dict()
        except PreconditionError as e:
            logger.info(f"Only the trivial entire solution: {e}")
    point = newton_solve(spec, T=numeric.T, nodes=numeric.grid_nodes)
    return build_profile(point.t_grid, point.solution, spec), point.as_dict()


@handler('solve')
def run_solve(config, writer, stdout):
    spec, numeric = config.spec, config.numeric
    gamma = spec.coefficients.gamma
    if spec.boundary is Boundary.ENTIRE:
        profile, summary = _entire_solution(config)
        profile = profile.rescaled(config.radius, gamma)
        writer.csv('profile.csv', PROFILE_HEADER, profile.to_rows())
        writer.json('solution.json', dict(summary, spec=spec.as_dict(), radius=config.radius, sup_norm=profile.sup_norm))
        return 0

    result = solve(
        spec, T=numeric.T, s_window=numeric.s_window, n_samples=numeric.n_samples,
        tol=numeric.tol, workers=numeric.workers, nodes=numeric.grid_nodes,
    )
    writer.csv('scan.csv', SCAN_HEADER, result.scan_rows())
    for i, root in enumerate(result.roots):
        writer.csv(f'profile_{i}.csv', PROFILE_HEADER, root.profile.rescaled(config.radius, gamma).to_rows())
    writer.json('roots.json', dict(result.as_dict(), spec=spec.as_dict(), radius=config.radius))
    return 0


@handler('portrait')
def run_portrait(config, writer, stdout):
    result = portrait(config.spec, horizon=config.numeric.horizon, tol=config.numeric.tol)
    labels = {eq.point: i for i, eq in enumerate(result.equilibria)}
    for trace in result.traces:
        name = f'orbit_{labels[trace.equilibrium.point]}_{trace.branch.value}.csv'
        writer.csv(name, TRAJECTORY_HEADER, trace.trajectory.to_rows())
    writer.json('portrait.json', result.as_dict())
    return 0


@handler('manifold')
def run_manifold(config, writer, stdout):
    spec = config.spec
    trace = trace_manifold(
        origin(spec), config.manifold_branch, spec, horizon=config.numeric.horizon, tol=config.numeric.tol,
    )
    writer.csv('trajectory.csv', TRAJECTORY_HEADER, trace.trajectory.to_rows())
    writer.json('manifold.json', dict(trace.as_dict(), max_z=trace.max_z))
    return 0


@handler('scan')
def run_scan(config, writer, stdout):
    numeric = config.numeric
    shots = scan(config.spec, numeric.T, numeric.s_window, numeric.n_samples, tol=numeric.tol,
                 workers=numeric.workers)
    writer.csv('scan.csv', SCAN_HEADER, [shot.as_row() for shot in shots])
    return 0


@handler('branch')
def run_branch(config, writer, stdout):
    spec, numeric = config.spec, config.numeric
    direction = -1 if spec.lam < 0 else 1
    result = continue_branch(
        spec, lambda_step=numeric.lambda_step, lambda_max=numeric.lambda_max, direction=direction,
        T=numeric.T, nodes=numeric.grid_nodes,
    )
    writer.csv('branch.csv', BRANCH_HEADER, result.rows())
    writer.json('fold.json', result.report.as_dict())
    return 0


@handler('threshold')
def run_threshold(config, writer, stdout):
    spec, numeric = config.spec, config.numeric
    report = nonexistence_threshold(spec.datum, spec.N, spec.boundary, nodes=numeric.grid_nodes, T=numeric.T)
    writer.json('threshold.json', dict(report.as_dict(), spec=spec.as_dict()))
    return 0


@handler('verify')
def run_verify(config, writer, stdout):
    from .acceptance import format_table, run_checks

    results = run_checks(workers=config.numeric.workers)
    writer.json('verify.json', {
        'passed': all(result.passed for result in results),
        'checks': [result.as_dict() for result in results],
    })
    if stdout is not None:
        stdout.write(format_table(results))
    return 0 if all(result.passed for result in results) else 1
