from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
import scipy.sparse as sp
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from sklearn.metrics.pairwise import cosine_similarity

from cgc.condensers.utils.config import (
    JITTER_GROWTH,
    JITTER_RETRIES,
    JITTER_SCALE,
)
from cgc.core.errors import ConfigError, NumericalError, StructuralError
from cgc.core.graph import SparseAdjacency, normalize
from cgc.core.types import CondensedGraph

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from cgc.core.graph import FloatArray, LabeledNodes

logger = logging.getLogger()


def make_graphless(
    H_prime: FloatArray, y_prime: LabeledNodes
) -> CondensedGraph:
    return CondensedGraph(labels=y_prime, features=H_prime, adjacency=None)


def build_adjacency(H_prime: ArrayLike, threshold: float) -> SparseAdjacency:
    """Connects i != j whenever cos(h_i, h_j) > threshold.

    All-zero rows have cosine 0 to every row.
    """
    if not 0.0 <= threshold < 1.0:
        raise ConfigError(
            f"cosine threshold must lie in [0, 1), got {threshold}"
        )
    h = np.asarray(H_prime, dtype=np.float64)
    similarity = cosine_similarity(h)
    rows, cols = np.nonzero(np.triu(similarity > threshold, k=1))
    return SparseAdjacency.from_edges(
        h.shape[0],
        np.concatenate([rows, cols]),
        np.concatenate([cols, rows]),
    )


def laplacian(adj: SparseAdjacency) -> sp.csr_matrix:
    """Unnormalized Laplacian D - A."""
    return (sp.diags(adj.degrees()) - adj.matrix).tocsr()


def condensed_operator(adj: SparseAdjacency, K: int) -> FloatArray:
    """Dense Q = A_hat^K by repeated multiplication."""
    a_hat = normalize(adj).to_dense()
    q = np.eye(adj.num_nodes)
    for _ in range(K):
        q = a_hat @ q
    return q


def dirichlet_energy(features: ArrayLike, adj: SparseAdjacency) -> float:
    """tr(X^T L X) = sum over edges of the squared feature difference."""
    x = np.asarray(features, dtype=np.float64)
    return float(np.sum(x * (laplacian(adj) @ x)))


def feature_objective(
    features: ArrayLike,
    H_prime: ArrayLike,
    Q: FloatArray,
    L: FloatArray | sp.csr_matrix,
    alpha: float,
) -> float:
    """||Q X - H'||^2 + alpha tr(X^T L X)."""
    x = np.asarray(features, dtype=np.float64)
    residual = Q @ x - np.asarray(H_prime, dtype=np.float64)
    return float(np.sum(residual**2) + alpha * np.sum(x * (L @ x)))


def solve_features(
    H_prime: ArrayLike,
    adj: SparseAdjacency,
    alpha: float,
    K: int,
    jitter: float | None = None,
) -> FloatArray:
    """Closed-form minimizer X' = (Q^T Q + alpha L)^-1 Q^T H'.

    The system gets `jitter * I` (default 1e-8 times its mean diagonal)
    before a Cholesky factorization; a failed factorization retries with ten
    times the jitter (the default when the jitter was zero), at most three
    times.
    """
    if alpha < 0:
        raise ConfigError(f"alpha must be >= 0, got {alpha}")
    h = np.asarray(H_prime, dtype=np.float64)
    n = adj.num_nodes
    if h.ndim != 2 or h.shape[0] != n:
        raise StructuralError(
            f"H' of shape {h.shape} does not match a {n}-node adjacency"
        )

    q = condensed_operator(adj, K)
    system = q.T @ q + alpha * laplacian(adj).toarray()
    rhs = q.T @ h
    scaled = JITTER_SCALE * float(np.trace(system)) / max(n, 1)
    current = scaled if jitter is None else jitter

    for attempt in range(JITTER_RETRIES + 1):
        try:
            factor = cho_factor(system + current * np.eye(n), lower=True)
            return np.asarray(cho_solve(factor, rhs), dtype=np.float64)
        except LinAlgError:
            if attempt == JITTER_RETRIES:
                break
            # A zero jitter has nothing to grow from
            grown = current * JITTER_GROWTH if current > 0 else scaled
            logger.warning(
                f"Cholesky failed with jitter {current:.3e}; retrying with"
                f" {grown:.3e}"
            )
            current = grown

    raise NumericalError(
        "feature solve failed after jitter escalation",
        diagnostics={
            "num_nodes": n,
            "alpha": alpha,
            "K": K,
            "last_jitter": current,
            "trace": float(np.trace(system)),
            "min_diagonal": float(np.min(np.diag(system))) if n else 0.0,
        },
    )
