from apps.cli.management.base import RunCommand


class Command(RunCommand):
    help = 'Equilibria and every one-dimensional manifold branch of the autonomous field.'
    command_name = 'portrait'
