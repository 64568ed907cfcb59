"""
Test settings for the khessian project.
"""
from .base import *

DEBUG = False

LOGGING['handlers'].pop('file')
LOGGING['root']['handlers'] = ['console']
LOGGING['handlers']['console']['level'] = 'WARNING'

KHESSIAN_SETTINGS['THREADS'] = 2
