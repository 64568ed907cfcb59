from apps.cli.management.base import RunCommand


class Command(RunCommand):
    help = 'Trace one manifold branch of the origin (manifold_branch selects it).'
    command_name = 'manifold'
