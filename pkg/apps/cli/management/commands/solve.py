from apps.cli.management.base import RunCommand


class Command(RunCommand):
    help = 'Solve a problem: shooting roots on the ball, a collocated or monotone solution on R^N.'
    command_name = 'solve'
