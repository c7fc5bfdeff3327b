"""
Package constants
"""
import math

# Scan surface kinds
SURFACE_SEMICIRCLE = 'semicircle2d'
SURFACE_HEMISPHERE = 'hemisphere3d'
SURFACE_EWALD = 'ewald3d'
SURFACE_KINDS = (SURFACE_SEMICIRCLE, SURFACE_HEMISPHERE, SURFACE_EWALD)

# Short names accepted on the command line
SURFACE_ALIASES = {
    'semicircle': SURFACE_SEMICIRCLE,
    'hemisphere': SURFACE_HEMISPHERE,
    'ewald': SURFACE_EWALD,
}

# Smallest polar angle sampled on the Ewald sphere (the origin is excluded)
EWALD_MIN_POLAR = 0.02

# Detection methods
METHOD_SMOOTH = 'smooth'
METHOD_CLUSTER = 'cluster'
DETECTION_METHODS = (METHOD_SMOOTH, METHOD_CLUSTER)

# Forward-model defaults
DEFAULT_LAMBDA = 0.01
DEFAULT_GRID_2D = 512
DEFAULT_GRID_3D = 256
DEFAULT_CHUNK = 16384

# Detection defaults
DEFAULT_WINDOW = 5
DEFAULT_CLUSTER_CELLS = 3
DEFAULT_THETA_FRACTION = 0.3
SAME_DIRECTION_TOL = 1e-6

# Geometry tolerances (relative to the polytope diameter)
GEOMETRY_TOL = 1e-9
SIMPLEX_DET_TOL = 1e-12
FACET_GENERIC_TOL = SAME_DIRECTION_TOL
ORTHOGONAL_TOL = 1e-9

# Fourier limit handling
LIMIT_EPS = 1e-8
SERIES_CUTOFF = 1e-4
SERIES_DEGREE = 8
PHASE_REDUCE_ABOVE = 1e8
TWO_PI = 2.0 * math.pi

# Quadrature oracle
QUAD_MAX_DIM = 4
QUAD_MIN_TOL = 1e-10
QUAD_MAX_DEPTH = 24
QUAD_MAX_CELLS = 400000
QUAD_BATCH = 4096

# Reconstruction
EXACT_SIGN_TOL = 1e-9
DETECTED_SIGN_TOL = 1e-2
CLOSURE_TOL = 1e-6
MAX_SIGN_FACETS = 30
SIGN_CHUNK = 1 << 16
FIT_MAX_SWEEPS = 400
FIT_TOL = 1e-14
FIT_MIN_STEP = 1e-12
FIT_POLISH_STEPS = 30
# fitted vertices closer than this (relative to max support) are one vertex
FIT_MERGE_TOL = 1e-6

# Exit codes
EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DETECTION_EMPTY = 3
EXIT_INFEASIBLE = 4
EXIT_IO = 5
