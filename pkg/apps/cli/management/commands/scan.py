from apps.cli.management.base import RunCommand


class Command(RunCommand):
    help = 'Sample the shooting mismatch over numeric.s_window.'
    command_name = 'scan'
