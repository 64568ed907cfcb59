from apps.cli.management.base import RunCommand


class Command(RunCommand):
    help = 'Large-lambda non-existence bound for a nonnegative datum.'
    command_name = 'threshold'
