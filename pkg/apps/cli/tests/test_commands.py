"""
Tests for the run commands, artifacts, manifests and exit codes.
"""
import csv
import json
import math
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path

import pytest
from django.core import management
from django.core.management import call_command
from django.core.management.base import CommandError

from apps.cli import acceptance
from apps.cli.utils import parse_config
from apps.core.exceptions import NoConvergence
import khessian.__main__ as entry


def run_dir(tmp_path, command):
    (directory,) = [path for path in tmp_path.iterdir() if path.name.startswith(f'{command}-')]
    return directory


def manifest(directory):
    return json.loads((directory / 'manifest.json').read_text())


def read_rows(path):
    with open(path, newline='') as fh:
        return list(csv.DictReader(fh))


def test_portrait_artifacts(tmp_path):
    call_command('portrait', '--set', 'N=4', '--out', str(tmp_path))
    directory = run_dir(tmp_path, 'portrait')
    data = manifest(directory)
    assert data['status'] == 0
    assert data['config']['N'] == 4
    assert set(data['versions']) == {'python', 'numpy', 'scipy', 'django', 'khessian'}
    assert 'portrait.json' in data['artifacts']
    assert any(name.startswith('orbit_0_') for name in data['artifacts'])
    for name in data['artifacts']:
        assert (directory / name).stat().st_size > 0

    points = [eq['point'] for eq in json.loads((directory / 'portrait.json').read_text())['equilibria']]
    assert any(z == pytest.approx(8 / 3) and y == 0.0 for z, y in points)


def test_json_only_output(tmp_path):
    call_command('portrait', '--set', 'N=5', '--set', 'output.formats=["json"]', '--out', str(tmp_path))
    directory = run_dir(tmp_path, 'portrait')
    assert manifest(directory)['artifacts'] == ['portrait.json']
    assert not list(directory.glob('*.csv'))


def test_manifold_command(tmp_path):
    call_command('manifold', '--set', 'N=4', '--out', str(tmp_path))
    directory = run_dir(tmp_path, 'manifold')
    trace = json.loads((directory / 'manifold.json').read_text())
    assert trace['verdict']['kind'] == 'homoclinic'
    assert trace['max_z'] == pytest.approx(4.0, abs=1e-2)
    assert read_rows(directory / 'trajectory.csv')[0].keys() == {'t', 'z', 'y'}


SCAN_SETTINGS = ['--set', 'N=5', '--set', 'numeric.s_window=[-2,2]', '--set', 'numeric.n_samples=201']


@pytest.mark.slow
def test_scan_brackets_only_the_origin(tmp_path):
    call_command('scan', *SCAN_SETTINGS, '--out', str(tmp_path))
    rows = read_rows(run_dir(tmp_path, 'scan') / 'scan.csv')
    signs = [(float(row['s']), math.copysign(1.0, float(row['mismatch'])))
             for row in rows if float(row['mismatch']) != 0.0]
    flips = [(a[0], b[0]) for a, b in zip(signs, signs[1:]) if a[1] != b[1]]
    assert len(flips) == 1
    lo, hi = flips[0]
    assert lo < 0.0 < hi


@pytest.mark.slow
def test_identical_configs_give_identical_csv(tmp_path):
    first, second = tmp_path / 'first', tmp_path / 'second'
    call_command('scan', *SCAN_SETTINGS, '--out', str(first))
    call_command('scan', *SCAN_SETTINGS, '--set', 'numeric.workers=1', '--out', str(second))
    one, two = run_dir(first, 'scan'), run_dir(second, 'scan')
    assert (one / 'scan.csv').read_bytes() == (two / 'scan.csv').read_bytes()


def test_threshold_routing(tmp_path):
    call_command(
        'threshold', '--set', 'N=4', '--set', 'datum={"kind": "power_law", "c": 1, "p": 1}', '--out', str(tmp_path),
    )
    report = json.loads((run_dir(tmp_path, 'threshold') / 'threshold.json').read_text())
    assert report['lambda_bar'] == pytest.approx(576.0, rel=1e-4)


def test_entire_solve_on_a_scaled_space(tmp_path):
    call_command('solve', '--set', 'N=4', '--set', 'boundary=entire', '--set', 'radius=2', '--out', str(tmp_path))
    directory = run_dir(tmp_path, 'solve')
    summary = json.loads((directory / 'solution.json').read_text())
    assert summary['connection'] == 'homoclinic'
    assert summary['radius'] == 2.0
    rows = read_rows(directory / 'profile.csv')
    row = min(rows, key=lambda row: abs(float(row['r']) - 2.0))
    r = float(row['r'])
    assert float(row['u']) == pytest.approx(8 / (1 + r ** 2 / 4), abs=1e-5)


def test_radius_must_be_positive(tmp_path):
    with pytest.raises(CommandError) as info:
        call_command('solve', '--set', 'N=4', '--set', 'radius=0', '--out', str(tmp_path))
    assert info.value.returncode == 1


def test_branch_command(tmp_path):
    call_command(
        'branch', '--set', 'N=4', '--set', 'lambda=-1', '--set', 'datum={"kind": "power_law", "p": 1}',
        '--set', 'numeric.lambda_step=1', '--set', 'numeric.lambda_max=3', '--set', 'numeric.grid_nodes=1001',
        '--out', str(tmp_path),
    )
    directory = run_dir(tmp_path, 'branch')
    rows = read_rows(directory / 'branch.csv')
    assert list(rows[0]) == ['lambda', 'sup_norm', 'newton_iterations', 'residual']
    assert [float(row['lambda']) for row in rows] == [0.0, -1.0, -2.0, -3.0]
    assert json.loads((directory / 'fold.json').read_text())['fold_lambda'] is None


def test_invalid_config_exits_with_one(tmp_path):
    with pytest.raises(CommandError) as info:
        call_command('portrait', '--set', 'N=1', '--out', str(tmp_path))
    assert info.value.returncode == 1
    assert 'N' in str(info.value)


def test_unwritable_output_exits_with_one(tmp_path):
    blocker = tmp_path / 'blocker'
    blocker.write_text('not a directory')
    with pytest.raises(CommandError) as info:
        call_command('portrait', '--set', 'N=4', '--out', str(blocker))
    assert info.value.returncode == 1


def test_non_convergence_exits_with_two(tmp_path, monkeypatch):
    def fail(*args, **kwargs):
        raise NoConvergence('damping exhausted')

    monkeypatch.setattr('apps.cli.runner.continue_branch', fail)
    with pytest.raises(CommandError) as info:
        call_command('branch', '--set', 'N=4', '--out', str(tmp_path))
    assert info.value.returncode == 2
    data = manifest(run_dir(tmp_path, 'branch'))
    assert data['status'] == 2
    assert data['error'] == 'damping exhausted'


def test_domain_failure_inside_a_run_exits_with_one(tmp_path):
    # zero datum: the threshold constants vanish
    with pytest.raises(CommandError) as info:
        call_command('threshold', '--set', 'N=4', '--out', str(tmp_path))
    assert info.value.returncode == 1
    assert manifest(run_dir(tmp_path, 'threshold'))['status'] == 1


def test_verify_prints_a_table(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(acceptance, 'CHECKS', {
        name: acceptance.CHECKS[name] for name in ('spectral_data', 'kernel_report')
    })
    call_command('verify', '--out', str(tmp_path))
    output = capsys.readouterr().out
    assert 'spectral_data' in output and '2/2 passed' in output
    report = json.loads((run_dir(tmp_path, 'verify') / 'verify.json').read_text())
    assert report['passed']


def test_verify_fails_when_a_check_fails(tmp_path, monkeypatch):
    def broken(workers):
        raise ValueError('boom')

    monkeypatch.setattr(acceptance, 'CHECKS', {'broken': broken, 'spectral_data': acceptance.spectral_data})
    with pytest.raises(CommandError) as info:
        call_command('verify', '--out', str(tmp_path))
    assert info.value.returncode == 1
    checks = json.loads((run_dir(tmp_path, 'verify') / 'verify.json').read_text())['checks']
    assert checks[0]['name'] == 'broken' and not checks[0]['passed']
    assert checks[0]['error'] == 'ValueError: boom'


def test_run_names_follow_the_config_digest(tmp_path):
    call_command('portrait', '--set', 'N=4', '--out', str(tmp_path))
    expected = parse_config('{"command": "portrait", "N": 4}').run_name
    assert run_dir(tmp_path, 'portrait').name == expected


def test_console_entry_point(monkeypatch):
    project = tomllib.loads((Path(__file__).resolve().parents[3] / 'pyproject.toml').read_text())
    assert project['project']['scripts']['khessian'] == 'khessian.__main__:main'

    seen = []
    monkeypatch.setattr(management, 'execute_from_command_line', seen.append)
    monkeypatch.setattr('sys.argv', ['khessian', 'verify', '--out', 'runs'])
    entry.main()
    assert seen == [['khessian', 'verify', '--out', 'runs']]
