import sys
from pathlib import Path

import numpy as np
import pytest

# Add src directory to Python path before any cgc imports
PROJECT_ROOT = Path(__file__).resolve().parent.parent
SRC_PATH = PROJECT_ROOT / "src"
if str(SRC_PATH) not in sys.path:
    sys.path.append(str(SRC_PATH))

from cgc.core.graph import (  # noqa: E402
    Dataset,
    LabeledNodes,
    SparseAdjacency,
)
from cgc.datasets.synthetic import synth_sbm  # noqa: E402


def two_clique_dataset(task="transductive"):
    """Two disjoint 4-cliques with class-separable 2-d features."""
    edges = [(u, v) for u in range(4) for v in range(u + 1, 4)]
    edges += [(u + 4, v + 4) for u, v in edges]
    rows, cols = zip(*edges, strict=True)
    adjacency = SparseAdjacency.from_edges(8, rows, cols, symmetrize=True)
    features = np.array(
        [
            [1.0, 0.1],
            [0.9, 0.0],
            [1.1, 0.2],
            [1.0, -0.1],
            [0.0, 1.0],
            [0.1, 0.9],
            [-0.1, 1.1],
            [0.2, 1.0],
        ]
    )
    return Dataset(
        adjacency=adjacency,
        features=features,
        labels=LabeledNodes(np.array([0, 0, 0, 0, 1, 1, 1, 1]), 2),
        train_idx=np.array([0, 1, 4, 5]),
        val_idx=np.array([2, 6]),
        test_idx=np.array([3, 7]),
        task=task,
        name="two-cliques",
    )


# --- Shared Fixtures ---
@pytest.fixture
def path_adjacency():
    """Undirected path 0 - 1 - 2 - 3."""
    return SparseAdjacency.from_edges(4, [0, 1, 2], [1, 2, 3], symmetrize=True)


@pytest.fixture
def two_cliques():
    return two_clique_dataset()


@pytest.fixture
def inductive_cliques():
    return two_clique_dataset("inductive")


@pytest.fixture
def sbm():
    """Three well separated classes of 40 nodes."""
    return synth_sbm(
        classes=3,
        nodes_per_class=40,
        p_in=0.3,
        p_out=0.02,
        d=8,
        class_center_scale=3.0,
        seed=0,
    )


@pytest.fixture
def balanced_sbm():
    """Four classes, generated so that untrained models sit near chance."""
    return synth_sbm(
        classes=4,
        nodes_per_class=50,
        p_in=0.2,
        p_out=0.02,
        d=16,
        class_center_scale=2.0,
        seed=3,
    )
