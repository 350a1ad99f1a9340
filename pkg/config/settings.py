"""
Settings for the nashpoly solver.

Every value can be overridden from the environment or a .env file.
"""

import logging.config
from pathlib import Path
from decouple import config

# Build paths inside the project
BASE_DIR = Path(__file__).resolve().parent.parent

# Conic back-end ("embedded" or "cvxpy")
SOLVER_BACKEND = config('NASHPOLY_SOLVER', default='embedded')

# Interior point tolerances
FEAS_TOL = config('NASHPOLY_FEAS_TOL', default=1e-8, cast=float)
GAP_TOL = config('NASHPOLY_GAP_TOL', default=1e-8, cast=float)
MAX_ITERS = config('NASHPOLY_MAX_ITERS', default=200, cast=int)

# Flat truncation and extraction
RANK_TOL = config('NASHPOLY_RANK_TOL', default=1e-6, cast=float)
EXTRACTION_TOL = config('NASHPOLY_EXTRACTION_TOL', default=1e-6, cast=float)

# Equilibrium search
FEAS_CHECK_TOL = config('NASHPOLY_FEAS_CHECK_TOL', default=1e-6, cast=float)
OMEGA_TOL = config('NASHPOLY_OMEGA_TOL', default=1e-6, cast=float)
DELTA_INIT = config('NASHPOLY_DELTA_INIT', default=0.1, cast=float)
DELTA_SHRINK = config('NASHPOLY_DELTA_SHRINK', default=5.0, cast=float)
K_MAX = config('NASHPOLY_K_MAX', default=4, cast=int)
# Player checks have only n_i variables and may go this far past K_MAX
CHECK_EXTRA_ORDERS = config('NASHPOLY_CHECK_EXTRA_ORDERS', default=2, cast=int)
MAX_OUTER_LOOPS = config('NASHPOLY_MAX_OUTER_LOOPS', default=30, cast=int)
SEED = config('NASHPOLY_SEED', default=0, cast=int)
WORKERS = config('NASHPOLY_WORKERS', default=1, cast=int)

# Distinct equilibria are separated by more than this in the infinity norm
DISTINCT_TOL = 1e-4

# Bundled problem files
PROBLEMS_DIR = BASE_DIR / 'nashpoly' / 'cli' / 'problems'

# Logging
LOG_LEVEL = config('NASHPOLY_LOG_LEVEL', default='INFO')
LOG_FILE = config('NASHPOLY_LOG_FILE', default='')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'nashpoly': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}

if LOG_FILE:
    LOGGING['handlers']['file'] = {
        'class': 'logging.FileHandler',
        'filename': LOG_FILE,
        'formatter': 'verbose',
    }
    LOGGING['loggers']['nashpoly']['handlers'].append('file')


def configure_logging(level=None):
    """
    Apply the LOGGING dictionary.

    Args:
        level: Optional level name overriding NASHPOLY_LOG_LEVEL for the
            nashpoly logger.
    """
    logging.config.dictConfig(LOGGING)
    if level:
        logging.getLogger('nashpoly').setLevel(level)
