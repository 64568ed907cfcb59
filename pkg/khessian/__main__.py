"""Entry point for ``python -m khessian <command>``."""
import os
import sys


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'khessian.settings.production')
    from django.core.management import execute_from_command_line
    execute_from_command_line(['khessian'] + sys.argv[1:])


if __name__ == '__main__':
    main()
