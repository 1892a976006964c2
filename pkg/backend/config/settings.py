"""
Django settings for the linbandit project.

This module contains all configuration for the experimentation library and
its management-command CLI, including:
- Application configuration
- Logging
- Worker pool sizing
- Default experiment parameters

Environment variables are loaded from .env file in the project root.
There is no database and no web surface; Django provides the app registry,
settings and the ``manage.py`` command runner.
"""
import os
import warnings
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Union
from dotenv import load_dotenv

# Build paths inside the project
BASE_DIR = Path(__file__).resolve().parent.parent
PROJECT_ROOT = BASE_DIR.parent

# Load environment variables from .env file
load_dotenv(dotenv_path=PROJECT_ROOT / '.env')

# Security Settings
# Unused by the CLI but required by Django's settings validation
SECRET_KEY = os.getenv('SECRET_KEY', 'linbandit-local-only')
DEBUG = os.getenv('DEBUG', 'False').lower() == 'true'

# Application definition
INSTALLED_APPS = [
    # Local applications (order matters for dependencies)
    'bandits',
    'experiments',
]

# No persistence layer: results are written as CSV/JSON files
DATABASES: Dict[str, Any] = {}

# Internationalization
TIME_ZONE = 'UTC'
USE_TZ = True

Number = Union[int, float]


def env_number(
    name: str,
    cast: Callable[[str], Number],
    default: Optional[Number],
    minimum: Optional[Number] = None,
) -> Optional[Number]:
    """
    Read a numeric environment variable, falling back to ``default``.

    Malformed or out-of-range values warn and are treated as absent, so a
    bad .env entry never stops settings from loading.

    Args:
        name: Environment variable name
        cast: ``int`` or ``float``
        default: Value used when unset or invalid
        minimum: Smallest accepted value, if any

    Returns:
        The parsed value or ``default``
    """
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = cast(raw)
    except ValueError:
        warnings.warn(f'{name}={raw!r} is not a valid {cast.__name__}; using {default!r}.', UserWarning)
        return default
    if minimum is not None and value < minimum:
        warnings.warn(f'{name}={raw!r} must be >= {minimum}; using {default!r}.', UserWarning)
        return default
    return value


# Worker Pool
# Caps the number of trial worker processes; absent means os.cpu_count()
LINBANDIT_THREADS = env_number('LINBANDIT_THREADS', int, None, minimum=1)

# Experiment Defaults
# Every default can be overridden with LINBANDIT_<NAME>, then by a JSON
# config file, then by command-line flags.
LINBANDIT_DEFAULTS: Dict[str, Any] = {
    'dim': env_number('LINBANDIT_DIM', int, 5),
    'rounds': env_number('LINBANDIT_ROUNDS', int, 3000),
    'trials': env_number('LINBANDIT_TRIALS', int, 1000),
    'sigma': env_number('LINBANDIT_SIGMA', float, 1.0),
    'kappa': env_number('LINBANDIT_KAPPA', float, 1.0),
    'theta_norm': env_number('LINBANDIT_THETA_NORM', float, 1.0),
    'delta': env_number('LINBANDIT_DELTA', float, 0.1),
    'seed': env_number('LINBANDIT_SEED', int, 0),
    'record_every': env_number('LINBANDIT_RECORD_EVERY', int, 10),
    'noise': os.getenv('LINBANDIT_NOISE', 'gaussian'),
    'theta_mode': os.getenv('LINBANDIT_THETA_MODE', 'resample-per-trial'),
    'policies': [
        name.strip()
        for name in os.getenv('LINBANDIT_POLICIES', 'ofu,orth-batch').split(',')
        if name.strip()
    ],
    'format': os.getenv('LINBANDIT_FORMAT', 'csv'),
}

# Logging Configuration
# Console only, on stderr, so command output on stdout stays machine-readable
LINBANDIT_LOG_LEVEL = os.getenv('LINBANDIT_LOG_LEVEL', 'DEBUG' if DEBUG else 'INFO').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'bandits': {
            'handlers': ['console'],
            'level': LINBANDIT_LOG_LEVEL,
            'propagate': False,
        },
        'experiments': {
            'handlers': ['console'],
            'level': LINBANDIT_LOG_LEVEL,
            'propagate': False,
        },
    },
}
