"""
Run configuration and outcome types for the command-line front end.
"""
import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum

from apps.core.models import ProblemSpec


class Command(str, Enum):
    SOLVE = 'solve'
    PORTRAIT = 'portrait'
    MANIFOLD = 'manifold'
    SCAN = 'scan'
    BRANCH = 'branch'
    THRESHOLD = 'threshold'
    VERIFY = 'verify'


class OutputFormat(str, Enum):
    CSV = 'csv'
    JSON = 'json'


@dataclass(frozen=True)
class NumericConfig:
    tol: float
    T: float
    grid_nodes: int
    s_window: tuple
    n_samples: int
    lambda_step: float
    lambda_max: float
    horizon: float
    workers: int = None

    def as_dict(self):
        return {
            'tol': self.tol,
            'T': self.T,
            'grid_nodes': self.grid_nodes,
            's_window': list(self.s_window),
            'n_samples': self.n_samples,
            'lambda_step': self.lambda_step,
            'lambda_max': self.lambda_max,
            'horizon': self.horizon,
            'workers': self.workers,
        }


@dataclass(frozen=True)
class OutputConfig:
    directory: str
    formats: frozenset

    def wants(self, fmt):
        return OutputFormat(fmt) in self.formats

    def as_dict(self):
        return {'directory': self.directory, 'formats': sorted(f.value for f in self.formats)}


@dataclass(frozen=True)
class RunConfig:
    command: Command
    spec: ProblemSpec
    numeric: NumericConfig
    output: OutputConfig
    manifold_branch: str = 'stable_right'
    radius: float = 1.0
    # datum as written in the document, kept for hashing tabulated paths
    datum_source: dict = field(default_factory=dict, compare=False)

    def as_dict(self):
        spec = self.spec.as_dict()
        return {
            'command': self.command.value,
            'k': spec['k'],
            'N': spec['N'],
            'lambda': spec['lambda'],
            'boundary': spec['boundary'],
            'datum': self.datum_source or spec['datum'],
            'manifold_branch': self.manifold_branch,
            'radius': self.radius,
            'numeric': self.numeric.as_dict(),
            'output': self.output.as_dict(),
        }

    @property
    def digest(self):
        """sha256 of the canonical config without the output section."""
        document = self.as_dict()
        document.pop('output')
        text = json.dumps(document, sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(text.encode()).hexdigest()[:12]

    @property
    def run_name(self):
        return f'{self.command.value}-{self.digest}'


@dataclass
class RunOutcome:
    status: int
    directory: object
    artifacts: list = field(default_factory=list)
    error: str = None


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    error: str = None
    seconds: float = 0.0

    def as_dict(self):
        return {
            'name': self.name,
            'passed': self.passed,
            'detail': self.detail,
            'error': self.error,
            'seconds': self.seconds,
        }
