from os import getenv

from dotenv import load_dotenv

load_dotenv()

DEFAULT_SEED = int(getenv("CGC_SEED", default="0"))

# Propagation
DEFAULT_K = 2
DEFAULT_PPR_BETA = 0.1

# Augmentation and partition
DEFAULT_P = 50.0
DEFAULT_TAU = 1.0
DEFAULT_LABEL_RATE = 0.5  # N' as a share of N_train when no ratio is given
KMEANS_TOL = 1e-6
KMEANS_MAX_ITER = 100

# Structure
DEFAULT_THRESHOLD = 0.9
DEFAULT_ALPHA = 1.0
JITTER_SCALE = 1e-8  # Times trace(Q^T Q + alpha L) / N'
JITTER_GROWTH = 10.0
JITTER_RETRIES = 3

PRESETS: dict[str, dict[str, object]] = {
    "cgc": {"structure": "adjacency"},
    "cgc_x": {"structure": "identity"},
    "simdm": {
        "p": 0.0,
        "mode": "uniform",
        "method": "kmeans",
        "structure": "identity",
    },
    "no_aug": {"p": 0.0, "structure": "identity"},
    "no_cal": {"mode": "uniform", "structure": "identity"},
    "random_partition": {"method": "random", "structure": "identity"},
}
