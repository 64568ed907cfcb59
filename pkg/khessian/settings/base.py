"""
Base settings for the khessian project.
"""
import os
from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent.parent

SECRET_KEY = config('SECRET_KEY', default='khessian-local-only')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []

# Application definition
DJANGO_APPS = [
    'django.contrib.contenttypes',
]

THIRD_PARTY_APPS = [
    'rest_framework',
]

LOCAL_APPS = [
    'apps.core',
    'apps.transform',
    'apps.integrate',
    'apps.phaseplane',
    'apps.shoot',
    'apps.greens',
    'apps.branch',
    'apps.cli',
]

INSTALLED_APPS = DJANGO_APPS + THIRD_PARTY_APPS + LOCAL_APPS

# No persistence: every result is written as CSV/JSON artifacts
DATABASES = {}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# REST Framework configuration (serializers only, no views are routed)
REST_FRAMEWORK = {
    'UNAUTHENTICATED_USER': None,
}

LOG_DIR = Path(config('KHESSIAN_LOG_DIR', default=str(BASE_DIR / 'logs')))
os.makedirs(LOG_DIR, exist_ok=True)

# Logging configuration
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'file': {
            'level': 'INFO',
            'class': 'logging.FileHandler',
            'filename': LOG_DIR / 'khessian.log',
            'formatter': 'verbose',
        },
        'console': {
            'level': config('KHESSIAN_LOG_LEVEL', default='INFO'),
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console', 'file'],
        'level': 'DEBUG',
    },
}

# khessian specific settings
KHESSIAN_SETTINGS = {
    'THREADS': config('KHESSIAN_THREADS', default=os.cpu_count() or 1, cast=int),
    'OUTPUT_DIR': config('KHESSIAN_OUTPUT_DIR', default='runs'),
    'DEFAULT_TOL': 1e-10,
    'SCAN_TOL': 1e-8,
    'DEFAULT_T': 25.0,
    'GRID_NODES': 4001,
    'S_WINDOW': [-10.0, 10.0],
    'N_SAMPLES': 2001,
    'LAMBDA_STEP': 0.5,
    'LAMBDA_MAX': 1000.0,
    'HORIZON': 30.0,
}
