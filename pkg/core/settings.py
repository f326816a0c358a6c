"""
Django settings for the pm_topology project.

Only the pieces a batch verification tool needs are configured: the
installed apps, the run-record database, logging and the PM_TOPOLOGY
tunables read by every library module.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.1/ref/settings/
"""
import os
from os import getenv
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: nothing is served, the key only satisfies Django's checks
SECRET_KEY = getenv('PM_TOPOLOGY_SECRET_KEY', 'pm-topology-batch-only-not-secret')

DEBUG = False

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',

    'rest_framework',

    'distributions.apps.DistributionsConfig',
    'spaces.apps.SpacesConfig',
    'balls.apps.BallsConfig',
    'topology.apps.TopologyConfig',
    'convergence.apps.ConvergenceConfig',
    'falsifier.apps.FalsifierConfig',
    'runs.apps.RunsConfig',
]

REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': ['rest_framework.renderers.JSONRenderer'],
    'DEFAULT_PARSER_CLASSES': ['rest_framework.parsers.JSONParser'],
    'COMPACT_JSON': True,
    'STRICT_JSON': True,
    'UNICODE_JSON': True,
}

# Database
# Run records only; the checks themselves never touch the database.

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': getenv('PM_TOPOLOGY_DB', str(BASE_DIR / 'db.sqlite3')),
    },
}

# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Logging goes to stderr; stdout is reserved for report records.

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'stderr': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['stderr'],
        'level': getenv('PM_TOPOLOGY_LOG_LEVEL', 'WARNING'),
    },
}

PM_TOPOLOGY = {
    # tolerances
    'EPSILON': 1e-9,
    'EPSILON_STRICT': 1e-12,
    # evaluation grid: logarithmic points plus {0} and the negative points
    'T_GRID': (1e-3, 1e3, 64),
    'NEGATIVE_POINTS': (-1.0, -1e-3),
    'JUMP_STEPS': (1e-3, 1e-6, 1e-9),
    # sampling
    'SEED': 0,
    'N_VECTORS': 10_000,
    'N_SCALAR_PAIRS': 10_000,
    'WITNESS_SAMPLES': 200,
    'SEPARATION_SAMPLES': 1_000,
    'CHUNK_SIZE': 512,
    'THREADS': max(1, int(os.getenv('PM_TOPOLOGY_THREADS', '4'))),
    # witness constructions
    'LAMBDA_FLOOR': 1e-6,
    'BISECTION_STEPS': 60,
    'WITNESS_RESOLUTION': 1e-12,
    # convergence surrogate
    'CONVERGENCE_EPSILON': 1e-6,
    'CONVERGENCE_N_MAX': 10 ** 6,
    'LOCAL_BASE_K': 10,
}
