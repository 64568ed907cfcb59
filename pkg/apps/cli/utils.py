"""
Config parsing for the management commands: JSON documents, dotted
``--set`` overrides and conversion to RunConfig.
"""
import json
import logging
from pathlib import Path

from apps.core.exceptions import ConfigError, DomainError
from apps.core.models import ProblemSpec

from .models import Command, NumericConfig, OutputConfig, OutputFormat, RunConfig
from .serializers import DatumSerializer, RunConfigSerializer, flatten_errors

logger = logging.getLogger(__name__)


def decode_value(text):
    """JSON when it parses, the raw string otherwise."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_override(document, assignment):
    """
    Set ``a.b.c=value`` inside the nested document, creating sections as needed.
    """
    key, sep, value = assignment.partition('=')
    if not sep or not key:
        raise ConfigError(f'Override {assignment!r} is not of the form key=value.')
    parts = key.split('.')
    node = document
    for i, part in enumerate(parts[:-1]):
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigError('Not a section.', key_path='.'.join(parts[:i + 1]))
        node = child
    node[parts[-1]] = decode_value(value)
    return document


def load_document(path=None, overrides=()):
    """
    Precedence: overrides over the file; the serializers fill the rest.
    """
    document = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise ConfigError(f'Could not read config file: {e}') from e
        document.update(_parse_json(text))
    for assignment in overrides:
        apply_override(document, assignment)
    return document


def _parse_json(text):
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f'Malformed config document: {e.msg} at line {e.lineno}.') from e
    if not isinstance(document, dict):
        raise ConfigError('Config document must be a JSON object.')
    return document


def build_config(document):
    serializer = RunConfigSerializer(data=document)
    if not serializer.is_valid():
        errors = flatten_errors(serializer.errors)
        key_path, message = errors[0]
        for path, text in errors[1:]:
            logger.debug(f"Config error at {path}: {text}")
        raise ConfigError(message, key_path=key_path)
    data = serializer.validated_data

    datum_source = {key: value for key, value in data['datum'].items()}
    try:
        datum = DatumSerializer.build(data['datum'])
        spec = ProblemSpec(data['k'], data['N'], lam=data['lambda'], boundary=data['boundary'], datum=datum)
    except DomainError as e:
        raise ConfigError('; '.join(e.messages), key_path='datum') from e

    numeric = data['numeric']
    output = data['output']
    return RunConfig(
        command=Command(data['command']),
        spec=spec,
        numeric=NumericConfig(
            tol=numeric['tol'],
            T=numeric['T'],
            grid_nodes=numeric['grid_nodes'],
            s_window=tuple(numeric['s_window']),
            n_samples=numeric['n_samples'],
            lambda_step=numeric['lambda_step'],
            lambda_max=numeric['lambda_max'],
            horizon=numeric['horizon'],
            workers=numeric.get('workers'),
        ),
        output=OutputConfig(output['directory'], frozenset(OutputFormat(fmt) for fmt in output['formats'])),
        manifold_branch=data['manifold_branch'],
        radius=data['radius'],
        datum_source=datum_source,
    )


def parse_config(text, overrides=()):
    """
    RunConfig from a JSON document with defaults filled in.
    """
    document = _parse_json(text)
    for assignment in overrides:
        apply_override(document, assignment)
    return build_config(document)
