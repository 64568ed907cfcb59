"""
Production settings for the khessian project.
"""
from .base import *

DEBUG = False

# Logging
LOGGING['handlers']['file']['filename'] = config(
    'KHESSIAN_LOG_FILE', default=str(LOG_DIR / 'khessian.log')
)
