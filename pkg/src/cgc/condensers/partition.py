"""Class partition: per-class clustering of the pool and the calibrated
aggregation of each sub-class into one condensed node.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING

import numpy as np
import scipy.sparse as sp
from scipy.spatial.distance import cdist
from sklearn.cluster import kmeans_plusplus

from cgc.condensers.utils.config import (
    DEFAULT_LABEL_RATE,
    KMEANS_MAX_ITER,
    KMEANS_TOL,
)
from cgc.condensers.utils.types import (
    ClusterResult,
    CondensedLabelPlan,
    PartitionPlan,
)
from cgc.core.errors import ClusteringError, ConfigError, MissingClassError

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from cgc.condensers.utils.types import (
        AugmentedPool,
        ClusterMethod,
        WeightingMode,
    )
    from cgc.core.graph import FloatArray, IndexArray

logger = logging.getLogger()


def resolve_num_condensed(
    ratio: float | None,
    num_nodes: int,
    num_train: int,
    num_classes: int,
) -> int:
    """N' = round(ratio * N), or half the training nodes without a ratio."""
    if ratio is None:
        half = math.floor(DEFAULT_LABEL_RATE * num_train + 0.5)
        return max(num_classes, half)
    if not 0.0 < ratio <= 1.0:
        raise ConfigError(f"ratio must lie in (0, 1], got {ratio}")
    return max(1, math.floor(ratio * num_nodes + 0.5))


def plan_labels(
    train_labels: ArrayLike, num_classes: int, num_condensed: int
) -> CondensedLabelPlan:
    """Largest-remainder apportionment of N' over the training classes.

    Every class gets at least one node; the shortfall is taken from the
    currently largest class, lower class index first.
    """
    counts = np.bincount(
        np.asarray(train_labels, dtype=np.int64), minlength=num_classes
    )
    if num_condensed < num_classes:
        raise ConfigError(
            f"cannot condense into {num_condensed} nodes with"
            f" {num_classes} classes"
        )
    missing = np.flatnonzero(counts == 0)
    if missing.size:
        raise MissingClassError(
            f"classes without a training node: {missing.tolist()}"
        )

    total = int(counts.sum())
    scaled = counts * num_condensed
    sizes = scaled // total
    remainders = scaled % total
    shortfall = num_condensed - int(sizes.sum())
    order = np.lexsort((np.arange(num_classes), -remainders))
    sizes[order[:shortfall]] += 1

    for cls in np.flatnonzero(sizes == 0):
        donor = int(np.argmax(sizes))
        sizes[donor] -= 1
        sizes[cls] += 1
    return CondensedLabelPlan(sizes=sizes.astype(np.int64))


def _centroids(
    points: FloatArray, assignments: IndexArray, k: int
) -> FloatArray:
    n = assignments.size
    membership = sp.csr_matrix(
        (np.ones(n), (assignments, np.arange(n))), shape=(k, n)
    )
    counts = np.asarray(membership.sum(axis=1)).ravel()
    return np.asarray(membership @ points) / counts[:, None]


def _sse(
    points: FloatArray, assignments: IndexArray, centers: FloatArray
) -> float:
    return float(np.sum((points - centers[assignments]) ** 2))


def _repair_empty(
    assignments: IndexArray, distances: FloatArray, k: int
) -> tuple[IndexArray, int]:
    """Moves the point farthest from its centroid in the largest cluster
    into each empty cluster.
    """
    repairs = 0
    counts = np.bincount(assignments, minlength=k)
    for empty in np.flatnonzero(counts == 0):
        largest = int(np.argmax(counts))
        members = np.flatnonzero(assignments == largest)
        farthest = members[np.argmax(distances[members, largest])]
        assignments[farthest] = empty
        counts[largest] -= 1
        counts[empty] += 1
        repairs += 1
    return assignments, repairs


def cluster_class(
    points: ArrayLike,
    k: int,
    method: ClusterMethod = "kmeans",
    seed: int | np.random.SeedSequence = 0,
) -> ClusterResult:
    """Splits one class into k non-empty sub-classes.

    kmeans: k-means++ seeding then Lloyd iterations until the relative
    objective change drops below 1e-6 or 100 iterations. random: a uniform
    assignment that leaves no cluster empty.
    """
    x = np.asarray(points, dtype=np.float64)
    n = x.shape[0]
    if k < 1:
        raise ConfigError(f"need at least one sub-class, got k={k}")
    if n == 0:
        raise ClusteringError("cannot cluster an empty point set")
    if k > n:
        raise ClusteringError(
            f"cannot split {n} pool rows into {k} sub-classes; raise p to"
            " augment the pool or lower the condensation ratio"
        )

    rng = np.random.default_rng(seed)
    if method == "random":
        assignments = rng.permutation(np.arange(n) % k).astype(np.int64)
        centers = _centroids(x, assignments, k)
        return ClusterResult(
            assignments=assignments,
            centroids=centers,
            objective_history=(_sse(x, assignments, centers),),
        )
    if method != "kmeans":
        raise ConfigError(f"unknown clustering method {method!r}")

    centers, _ = kmeans_plusplus(
        x, n_clusters=k, random_state=int(rng.integers(2**31 - 1))
    )
    history: list[float] = []
    repairs = 0
    for _ in range(KMEANS_MAX_ITER):
        distances = cdist(x, centers, metric="sqeuclidean")
        assignments = distances.argmin(axis=1).astype(np.int64)
        assignments, repaired = _repair_empty(assignments, distances, k)
        repairs += repaired
        centers = _centroids(x, assignments, k)
        objective = _sse(x, assignments, centers)
        converged = bool(history) and (
            history[-1] - objective <= KMEANS_TOL * history[-1]
        )
        history.append(objective)
        if converged:
            break

    if repairs:
        logger.warning(f"Repaired {repairs} empty clusters during k-means")
    return ClusterResult(
        assignments=assignments,
        centroids=centers,
        objective_history=tuple(history),
        repairs=repairs,
    )


def partition_pool(
    pool: AugmentedPool,
    plan: CondensedLabelPlan,
    method: ClusterMethod = "kmeans",
    seed: int = 0,
    workers: int = 1,
) -> IndexArray:
    """Clusters each class of the pool; returns the condensed-node index of
    every pool row.

    Class i is seeded from SeedSequence([seed, i]) so the result does not
    depend on `workers` or scheduling.
    """

    def _cluster(cls: int) -> tuple[IndexArray, ClusterResult]:
        rows = np.flatnonzero(pool.labels == cls)
        result = cluster_class(
            pool.embeddings[rows],
            int(plan.sizes[cls]),
            method,
            np.random.SeedSequence([seed, cls]),
        )
        return rows, result

    classes = range(plan.num_classes)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_cluster, classes))
    else:
        results = [_cluster(cls) for cls in classes]

    offsets = plan.offsets
    assignments = np.empty(pool.size, dtype=np.int64)
    for cls, (rows, result) in enumerate(results):
        assignments[rows] = offsets[cls] + result.assignments
    return assignments


def _aggregation_matrix(
    assignments: IndexArray, weights: FloatArray, num_condensed: int
) -> sp.csr_matrix:
    """The row-normalized aggregation matrix P (N' x pool size)."""
    return sp.csr_matrix(
        (weights, (assignments, np.arange(assignments.size))),
        shape=(num_condensed, assignments.size),
    )


def aggregate(
    pool: AugmentedPool,
    plan: CondensedLabelPlan,
    assignments: IndexArray,
    tau: float,
    mode: WeightingMode = "softmax",
) -> PartitionPlan:
    """Collapses every sub-class to a confidence-weighted mean."""
    if tau <= 0:
        raise ConfigError(f"temperature must be > 0, got {tau}")
    num_condensed = plan.total
    confidence = pool.confidence
    warnings: list[str] = []

    if mode == "uniform":
        raw = np.ones(pool.size)
    elif mode == "softmax":
        # Shift by the sub-class maximum before exponentiating
        peak = np.full(num_condensed, -np.inf)
        np.maximum.at(peak, assignments, confidence)
        raw = np.exp((confidence - peak[assignments]) / tau)
    elif mode == "linear":
        # r / tau normalized per sub-class; tau cancels
        raw = confidence.astype(np.float64, copy=True)
        totals = np.bincount(assignments, weights=raw, minlength=num_condensed)
        zero = totals[assignments] == 0.0
        if zero.any():
            message = (
                f"{np.unique(assignments[zero]).size} sub-classes have zero"
                " total confidence; using uniform weights there"
            )
            logger.warning(message)
            warnings.append(message)
            raw[zero] = 1.0
    else:
        raise ConfigError(f"unknown weighting mode {mode!r}")

    totals = np.bincount(assignments, weights=raw, minlength=num_condensed)
    weights = raw / totals[assignments]
    aggregation = _aggregation_matrix(assignments, weights, num_condensed)
    embeddings = np.asarray(aggregation @ pool.embeddings)
    objective = float(
        np.sum((pool.embeddings - embeddings[assignments]) ** 2)
    )
    return PartitionPlan(
        assignments=assignments,
        weights=weights,
        embeddings=embeddings,
        labels=plan.condensed_labels,
        sizes=plan.sizes,
        objective=objective,
        warnings=tuple(warnings),
    )


def simplified_dm_objective(
    H_prime: ArrayLike, assignments: IndexArray, pool: AugmentedPool
) -> float:
    """||X' - P H||^2 with P the uniform aggregation implied by assignments."""
    x_prime = np.asarray(H_prime, dtype=np.float64)
    counts = np.bincount(assignments, minlength=x_prime.shape[0])
    aggregation = _aggregation_matrix(
        assignments, 1.0 / counts[assignments], x_prime.shape[0]
    )
    return float(np.sum((x_prime - aggregation @ pool.embeddings) ** 2))


def partition_objective(points: ArrayLike, assignments: IndexArray) -> float:
    """Within-sub-class sum of squared distances to the sub-class means."""
    x = np.asarray(points, dtype=np.float64)
    groups, local = np.unique(assignments, return_inverse=True)
    return _sse(x, local, _centroids(x, local, groups.size))
