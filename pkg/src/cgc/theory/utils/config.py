# Random instance shapes; the lambda = 0 identities need n > d > n' >= c
INSTANCE_NODES = 30
INSTANCE_DIM = 5
INSTANCE_CONDENSED = 4
INSTANCE_CLASSES = 2
INSTANCE_ATTEMPTS = 100
INSTANCES_PER_CHECK = 5

BOUND_NODES = 20
BOUND_SUBCLASSES = 2
PUSH_THROUGH_RIDGE = 1e-3

# Tolerances
CHAIN_TOL = 1e-8
PUSH_THROUGH_TOL = 1e-10
PROTOTYPE_TOL = 1e-10
BOUND_TOL = 1e-10
GRADIENT_TOL = 1e-6  # Times ||H'||_F
OBJECTIVE_TOL = 1e-12

# Feature-solve checks
FEATURE_ALPHAS = (0.3, 1.0, 3.0)
FEATURE_NODES = 20
FEATURE_EDGE_PROB = 0.15
PERTURBATIONS = 50
PERTURBATION_SCALE = 1e-3

DEFAULT_DRAWS = 100
