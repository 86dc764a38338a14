from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import scipy.sparse as sp

from cgc.condensers.utils.types import PropagationRule, PropagationStack
from cgc.core.errors import ConfigError, StructuralError
from cgc.core.graph import SparseAdjacency, normalize

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from cgc.core.graph import Dataset


def propagation_operator(
    adjacency: SparseAdjacency, rule: PropagationRule
) -> sp.csr_matrix:
    """Normalized operator for `rule`: D^-1/2 (A+I) D^-1/2 for sgc and ppr,
    the row-normalized closed neighbourhood D^-1 (A+I) for mean.
    """
    if rule.kind != "mean":
        return normalize(adjacency).matrix
    augmented = (
        adjacency.matrix + sp.identity(adjacency.num_nodes, format="csr")
    ).tocsr()
    degree = np.asarray(augmented.sum(axis=1), dtype=np.float64).ravel()
    return (sp.diags(1.0 / degree) @ augmented).tocsr()


def propagate_features(
    adjacency: SparseAdjacency | None,
    features: ArrayLike,
    K: int,
    rule: PropagationRule | None = None,
) -> PropagationStack:
    """Builds H^(0) ... H^(K); `adjacency=None` is the identity structure."""
    rule = rule or PropagationRule()
    if K < 0:
        raise ConfigError(f"propagation depth must be >= 0, got {K}")
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise StructuralError(f"features must be 2-D, got shape {x.shape}")

    if adjacency is None:
        return PropagationStack(layers=(x,) * (K + 1), rule=rule)
    if adjacency.num_nodes != x.shape[0]:
        raise StructuralError(
            f"cannot propagate {x.shape[0]} feature rows over a graph with"
            f" {adjacency.num_nodes} nodes"
        )

    operator = propagation_operator(adjacency, rule)
    layers = [x]
    h = x
    for _ in range(K):
        h = np.asarray(operator @ h)
        if rule.kind == "ppr":
            h = (1.0 - rule.beta) * h + rule.beta * x
        layers.append(h)
    return PropagationStack(layers=tuple(layers), rule=rule)


def propagate(
    ds: Dataset, K: int, rule: PropagationRule | None = None
) -> PropagationStack:
    return propagate_features(ds.adjacency, ds.features, K, rule)
