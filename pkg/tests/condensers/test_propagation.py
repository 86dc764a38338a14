import numpy as np
import pytest
from scipy.spatial.distance import pdist

from cgc.condensers.propagation import (
    propagate,
    propagate_features,
    propagation_operator,
)
from cgc.condensers.utils.types import PropagationRule
from cgc.core.errors import ConfigError, StructuralError
from cgc.core.graph import SparseAdjacency, normalize

FEATURES = np.arange(8.0).reshape(4, 2)


def test_zero_depth_keeps_only_the_input(path_adjacency):
    """Tests that K = 0 yields the input features alone."""
    stack = propagate_features(path_adjacency, FEATURES, 0)

    assert stack.K == 0
    np.testing.assert_array_equal(stack.last, FEATURES)


def test_identity_structure_repeats_the_features():
    """Tests that propagating without a graph copies X into every layer."""
    stack = propagate_features(None, FEATURES, 3)

    assert len(stack.layers) == 4
    for layer in stack.layers:
        np.testing.assert_array_equal(layer, FEATURES)


def test_sgc_layers_are_powers_of_the_normalized_adjacency(path_adjacency):
    """Tests that sgc layer k equals A_hat^k X."""
    # Arrange
    a_hat = normalize(path_adjacency).to_dense()

    # Act
    stack = propagate_features(path_adjacency, FEATURES, 2)

    # Assert
    np.testing.assert_allclose(stack.layers[1], a_hat @ FEATURES)
    np.testing.assert_allclose(stack.layers[2], a_hat @ a_hat @ FEATURES)


def test_ppr_mixes_the_input_back_in(path_adjacency):
    """Tests one ppr hop against (1 - beta) A_hat X + beta X."""
    # Arrange
    rule = PropagationRule(kind="ppr", beta=0.25)
    a_hat = normalize(path_adjacency).to_dense()

    # Act
    stack = propagate_features(path_adjacency, FEATURES, 1, rule)

    # Assert
    expected = 0.75 * (a_hat @ FEATURES) + 0.25 * FEATURES
    np.testing.assert_allclose(stack.last, expected)


def test_mean_rule_is_row_stochastic(path_adjacency):
    """Tests that the mean operator averages each node's neighbourhood."""
    operator = propagation_operator(
        path_adjacency, PropagationRule(kind="mean")
    )

    np.testing.assert_allclose(operator.sum(axis=1), np.ones((4, 1)))
    assert operator[0, 1] == pytest.approx(0.5)


def test_propagate_reads_the_dataset(two_cliques):
    """Tests that propagate uses the dataset's graph and features."""
    stack = propagate(two_cliques, 1)

    # Within a clique every node ends up at the clique mean
    np.testing.assert_allclose(
        stack.last[0], two_cliques.features[:4].mean(axis=0)
    )


def test_negative_depth_is_rejected(path_adjacency):
    """Tests that a negative depth is refused."""
    with pytest.raises(ConfigError, match="depth"):
        propagate_features(path_adjacency, FEATURES, -1)


def test_feature_row_mismatch_is_rejected(path_adjacency):
    """Tests that features with the wrong row count are refused."""
    with pytest.raises(StructuralError, match="cannot propagate"):
        propagate_features(path_adjacency, np.ones((3, 2)), 1)


@pytest.mark.parametrize(
    "kind, beta", [("heat", 0.1), ("ppr", -0.1), ("ppr", 1.5)]
)
def test_invalid_rules_are_rejected(kind, beta):
    """Tests that unknown rules and betas outside [0, 1] are refused."""
    with pytest.raises(ConfigError):
        PropagationRule(kind=kind, beta=beta)


# --- Tests for rule limits and smoothing ---


def test_two_node_edge_averages_the_endpoints():
    """Tests the hand-computed single hop over one edge."""
    adjacency = SparseAdjacency.from_edges(2, [0], [1], symmetrize=True)

    stack = propagate_features(adjacency, [[2.0, 0.0], [0.0, 2.0]], 1)

    np.testing.assert_allclose(stack.last, [[1.0, 1.0], [1.0, 1.0]])


def test_sgc_matches_repeated_dense_products():
    """Tests sgc layers against K-fold dense multiplication on a random
    10-node graph.
    """
    # Arrange
    rng = np.random.default_rng(4)
    rows, cols = np.triu_indices(10, k=1)
    keep = rng.random(rows.size) < 0.4
    adjacency = SparseAdjacency.from_edges(
        10, rows[keep], cols[keep], symmetrize=True
    )
    x = rng.standard_normal((10, 3))
    a_hat = normalize(adjacency).to_dense()

    # Act
    stack = propagate_features(adjacency, x, 4)

    # Assert
    expected = x
    for layer in stack.layers[1:]:
        expected = a_hat @ expected
        np.testing.assert_allclose(layer, expected, rtol=0, atol=1e-12)


def test_ppr_without_teleport_is_sgc(sbm):
    """Tests that ppr with beta = 0 reproduces sgc layer for layer."""
    ppr = propagate(sbm, 4, PropagationRule(kind="ppr", beta=0.0))
    sgc = propagate(sbm, 4)

    for ppr_layer, sgc_layer in zip(ppr.layers, sgc.layers, strict=True):
        np.testing.assert_allclose(ppr_layer, sgc_layer, rtol=0, atol=1e-12)


def test_ppr_with_full_teleport_returns_the_input(sbm):
    """Tests that ppr with beta = 1 keeps every layer at X."""
    stack = propagate(sbm, 3, PropagationRule(kind="ppr", beta=1.0))

    for layer in stack.layers:
        np.testing.assert_array_equal(layer, sbm.features)


def test_deeper_sgc_layers_are_smoother(sbm):
    """Tests that the mean pairwise row distance does not grow between
    four and eight hops.
    """
    # Act
    stack = propagate(sbm, 8)

    # Assert
    assert pdist(stack.layers[8]).mean() <= pdist(stack.layers[4]).mean()
