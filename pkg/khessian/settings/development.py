"""
Development settings for the khessian project.
"""
from .base import *

DEBUG = True

LOGGING['handlers']['console']['level'] = 'DEBUG'
