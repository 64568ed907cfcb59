from apps.cli.management.base import RunCommand


class Command(RunCommand):
    help = 'Continue the small-lambda branch from zero; the sign of lambda picks the direction.'
    command_name = 'branch'
