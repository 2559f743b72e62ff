"""
Django settings for the tensorlab project.

The project has no web surface: it hosts the ``decomposition`` app, whose
management commands are the command-line interface of the variational
Bayesian tensor robust PCA solver.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Only management commands run in this project; the key never signs anything.
SECRET_KEY = os.environ.get('SECRET_KEY', 'dev-insecure-key')

DEBUG = os.environ.get('DEBUG', 'True').lower() == 'true'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'decomposition.apps.DecompositionConfig',
]

# No models, so no database
DATABASES = {}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


def _parse_theta(raw):
    parts = [p.strip() for p in raw.split(',') if p.strip()]
    return tuple(float(p) for p in parts)


# Solver defaults (overridable per command with flags or --config files)
VBI_MAX_ITERS = int(os.environ.get('VBI_MAX_ITERS', 50))
VBI_RMSE_TOL = float(os.environ.get('VBI_RMSE_TOL', 1e-4))
VBI_SIGMA_S_CONVENTION = os.environ.get('VBI_SIGMA_S_CONVENTION', 'derivation')
VBI_THETA_INIT = _parse_theta(os.environ.get('VBI_THETA_INIT', '1,1,1'))

# Named workflow presets: synthetic benchmarks, color image denoising,
# and background modeling on grayscale video stacks.
VBI_PRESETS = {
    'synthetic': {
        'method': 'tnn',
        'theta': (100.0, 1.0, 1.0),
    },
    'image': {
        'method': 'pstnn',
        'k_trunc': 50,
        'theta': (100.0, 1.0, 1.0),
    },
    'background': {
        'method': 'pstnn',
        'k_trunc': 5,
        'theta': (1.0, 1.0, 100.0),
    },
}

# Directory for per-run JSON logs; empty disables them
VBI_RUN_LOG_DIR = os.environ.get('VBI_RUN_LOG_DIR', '').strip()

VBI_LOG_LEVEL = os.environ.get('VBI_LOG_LEVEL', 'INFO').upper()
VBI_LOG_FILE = os.environ.get('VBI_LOG_FILE', '').strip()

# Logging configuration
_LOG_HANDLERS = ['console']
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'decomposition': {
            'handlers': _LOG_HANDLERS,
            'level': VBI_LOG_LEVEL,
            'propagate': False,
        },
    },
}

if VBI_LOG_FILE:
    LOGGING['handlers']['file'] = {
        'class': 'logging.FileHandler',
        'filename': VBI_LOG_FILE,
        'formatter': 'verbose',
    }
    _LOG_HANDLERS.append('file')
