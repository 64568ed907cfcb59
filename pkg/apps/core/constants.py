"""
Numerical constants shared by the solver apps.
"""

# Integration
BLOWUP_THRESHOLD = 1e6
MIN_TOL = 1e-13
MAX_TOL = 1e-3
DEFAULT_TOL = 1e-10
SCAN_TOL = 1e-8
ATOL_FACTOR = 1e-3

# Manifolds
MANIFOLD_OFFSET = 1e-6
MIN_MANIFOLD_OFFSET = 1e-8
MAX_MANIFOLD_OFFSET = 1e-4
CONVERGENCE_BALL = 1e-3
CONVERGENCE_DWELL = 1.0
DEFAULT_HORIZON = 30.0

# Shooting
MIN_TRUNCATION = 10.0
SHOOT_ESCAPE_RADIUS = 1e2
SHOOT_ARM_RADIUS = 0.5
BISECTION_WIDTH = 1e-12
ROOT_TOL = 1e-6
ROOT_MERGE = 1e-6
MIN_SAMPLES = 100

# Green's functions and monotone iteration
MONOTONE_TOL = 1e-10
MONOTONE_MAX_ITER = 500
MONOTONE_SLACK = 1e-12
NEGLIGIBLE_TAIL = 1e-16

# Newton and continuation
NEWTON_STEP_TOL = 1e-12
NEWTON_RESIDUAL_TOL = 1e-10
NEWTON_MAX_ITER = 30
NEWTON_DAMPING_HALVINGS = 8
NEAR_SINGULAR = 1e7
MIN_LAMBDA_STEP = 1e-8
MIN_GRID_NODES = 1000

# Assumption check on tabulated data
ASSUMPTION_T_MAX = 40.0
ASSUMPTION_THRESHOLD = 1e-6
ASSUMPTION_SAMPLES = 400
