"""
Shared behaviour of the run commands: config loading, precedence and exit codes.
"""
import logging

from django.core.management.base import BaseCommand, CommandError

from apps.cli.runner import run
from apps.cli.utils import build_config, load_document
from apps.core.exceptions import ConfigError

logger = logging.getLogger(__name__)


class RunCommand(BaseCommand):
    command_name = None

    def add_arguments(self, parser):
        parser.add_argument('--config', help='JSON run configuration file.')
        parser.add_argument(
            '--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
            help='Override a config key, dotted for nested keys (numeric.tol=1e-8). Repeatable.',
        )
        parser.add_argument('--out', help='Output directory; overrides output.directory.')

    def handle(self, *args, **options):
        overrides = [f'command={self.command_name}', *options['overrides']]
        if options['out']:
            overrides.append(f"output.directory={options['out']}")
        try:
            document = load_document(options['config'], overrides)
            config = build_config(document)
        except ConfigError as e:
            logger.error(f"Invalid configuration: {e}")
            raise CommandError(str(e), returncode=1)

        try:
            outcome = run(config, stdout=self.stdout)
        except OSError as e:
            logger.error(f"Could not write run directory: {e}")
            raise CommandError(f'Could not write run directory: {e}', returncode=1)

        if outcome.status:
            raise CommandError(outcome.error or f'{self.command_name} failed', returncode=outcome.status)
        summary = f'{self.command_name}: {len(outcome.artifacts)} artifacts in {outcome.directory}'
        self.stdout.write(self.style.SUCCESS(summary))
