"""
Tests for run-config parsing and overrides.
"""
import json

import pytest

from apps.core.exceptions import ConfigError
from apps.core.models import Boundary, DatumKind
from apps.cli.models import Command, OutputFormat
from apps.cli.utils import apply_override, decode_value, load_document, parse_config


def test_minimal_document_gets_defaults():
    config = parse_config('{"command": "portrait", "k": 2, "N": 4, "lambda": 0}')
    assert config.command is Command.PORTRAIT
    assert config.spec.N == 4 and config.spec.lam == 0.0
    assert config.spec.boundary is Boundary.DIRICHLET
    assert config.spec.datum.kind is DatumKind.ZERO
    numeric = config.numeric
    assert numeric.tol == 1e-10
    assert numeric.T == 25.0
    assert numeric.grid_nodes == 4001
    assert numeric.s_window == (-10.0, 10.0)
    assert config.output.formats == {OutputFormat.CSV, OutputFormat.JSON}


def test_dimension_out_of_range():
    with pytest.raises(ConfigError) as info:
        parse_config('{"command": "portrait", "N": 1}')
    assert info.value.key_path == 'N'


@pytest.mark.parametrize('document, path', [
    ({'command': 'scan', 'N': 4, 'colour': 'red'}, 'colour'),
    ({'command': 'scan', 'N': 4, 'numeric': {'tolerance': 1e-8}}, 'numeric.tolerance'),
    ({'command': 'scan', 'N': 4, 'datum': {'kind': 'power_law', 'q': 1}}, 'datum.q'),
])
def test_unknown_keys_are_rejected(document, path):
    with pytest.raises(ConfigError) as info:
        parse_config(json.dumps(document))
    assert info.value.key_path == path


@pytest.mark.parametrize('document, path', [
    ({'command': 'scan', 'N': 4, 'numeric': {'tol': 1.0}}, 'numeric.tol'),
    ({'command': 'scan', 'N': 4, 'numeric': {'s_window': [2, -2]}}, 'numeric.s_window'),
    ({'command': 'scan', 'N': 4, 'numeric': {'grid_nodes': 10}}, 'numeric.grid_nodes'),
    ({'command': 'scan', 'N': 4, 'boundary': 'robin'}, 'boundary'),
    ({'command': 'launch', 'N': 4}, 'command'),
    ({'command': 'scan', 'N': 4, 'datum': {'kind': 'power_law'}}, 'datum.p'),
    ({'command': 'scan', 'N': 4, 'datum': {'kind': 'power_law', 'p': -2}}, 'datum'),
    ({'command': 'scan', 'k': 1, 'N': 4}, 'k'),
])
def test_out_of_range_values_name_their_key(document, path):
    with pytest.raises(ConfigError) as info:
        parse_config(json.dumps(document))
    assert info.value.key_path == path
    assert str(info.value).startswith(f'{path}: ')


def test_malformed_document():
    with pytest.raises(ConfigError):
        parse_config('{"command": "scan", ')
    with pytest.raises(ConfigError):
        parse_config('[1, 2]')


def test_threshold_document_carries_the_datum():
    config = parse_config(json.dumps({
        'command': 'threshold', 'N': 4, 'datum': {'kind': 'power_law', 'c': 1, 'p': 1},
    }))
    assert config.spec.datum.kind is DatumKind.POWER_LAW
    assert (config.spec.datum.c, config.spec.datum.p) == (1.0, 1.0)


def test_override_precedence():
    config = parse_config(
        '{"command": "scan", "N": 4, "numeric": {"tol": 1e-9}}',
        overrides=['numeric.tol=1e-8', 'boundary=navier', 'lambda=-0.5'],
    )
    assert config.numeric.tol == 1e-8
    assert config.spec.boundary is Boundary.NAVIER
    assert config.spec.lam == -0.5


def test_load_document_reads_the_file_then_overrides(tmp_path):
    path = tmp_path / 'run.json'
    path.write_text('{"command": "scan", "N": 5, "numeric": {"n_samples": 500}}')
    document = load_document(path, ['numeric.n_samples=300'])
    assert document == {'command': 'scan', 'N': 5, 'numeric': {'n_samples': 300}}
    with pytest.raises(ConfigError):
        load_document(tmp_path / 'missing.json')


def test_override_values():
    assert decode_value('1e-8') == 1e-8
    assert decode_value('[-2, 2]') == [-2, 2]
    assert decode_value('dirichlet') == 'dirichlet'
    assert apply_override({}, 'numeric.s_window=[-2,2]') == {'numeric': {'s_window': [-2, 2]}}
    with pytest.raises(ConfigError):
        apply_override({}, 'numeric.tol')
    with pytest.raises(ConfigError) as info:
        apply_override({'numeric': 3}, 'numeric.tol=1e-8')
    assert info.value.key_path == 'numeric'


def test_digest_ignores_the_output_section():
    one = parse_config('{"command": "scan", "N": 4, "output": {"directory": "a"}}')
    two = parse_config('{"command": "scan", "N": 4, "output": {"directory": "b", "formats": ["csv"]}}')
    three = parse_config('{"command": "scan", "N": 5}')
    assert one.digest == two.digest
    assert one.digest != three.digest
    assert one.run_name == f'scan-{one.digest}'
    assert len(one.digest) == 12
