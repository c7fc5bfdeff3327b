from dotenv import load_dotenv
import os

from polyrecon import constants

# Load environment variables
load_dotenv()


def _env_float(name, default):
    value = os.getenv(name)
    return float(value) if value not in (None, '') else default


def _env_int(name, default):
    value = os.getenv(name)
    return int(value) if value not in (None, '') else default


def create_config():
    """
    Build the run configuration from the environment.

    Every key has a built-in default; a `.env` file in the working directory
    is honoured. The CLI layers a config file and explicit flags on top.
    """
    config = {}

    # Forward model
    config['LAMBDA'] = _env_float('POLYRECON_LAMBDA', constants.DEFAULT_LAMBDA)
    config['SURFACE'] = os.getenv('POLYRECON_SURFACE') or None
    config['GRID_2D'] = _env_int('POLYRECON_GRID_2D', constants.DEFAULT_GRID_2D)
    config['GRID_3D'] = _env_int('POLYRECON_GRID_3D', constants.DEFAULT_GRID_3D)
    config['WORKERS'] = _env_int('POLYRECON_WORKERS', 1)

    # Detection
    config['METHOD'] = os.getenv('POLYRECON_METHOD', constants.METHOD_SMOOTH)
    config['THETA'] = _env_float('POLYRECON_THETA', None)
    config['WINDOW'] = _env_int('POLYRECON_WINDOW', constants.DEFAULT_WINDOW)
    config['CLUSTER_RADIUS'] = _env_float('POLYRECON_CLUSTER_RADIUS', None)

    # Reconstruction
    config['TOL'] = _env_float('POLYRECON_TOL', constants.DETECTED_SIGN_TOL)
    config['SEED'] = _env_int('POLYRECON_SEED', 0)

    config['LOG_LEVEL'] = os.getenv('POLYRECON_LOG_LEVEL', 'WARNING').upper()

    return config
