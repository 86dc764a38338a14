from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING

import numpy as np

from cgc.condensers.utils.types import AugmentedPool
from cgc.core.errors import ConfigError

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from cgc.condensers.utils.types import Assessment, PropagationStack
    from cgc.core.graph import FloatArray, IndexArray, LabeledNodes

logger = logging.getLogger()


def weighted_sample_without_replacement(
    weights: FloatArray, m: int, rng: np.random.Generator
) -> IndexArray:
    """Draws m distinct indices with probability proportional to `weights`.

    Exponential keys: key_i = E_i / w_i, keep the m smallest. Returns the
    chosen indices in ascending order.
    """
    if m <= 0:
        return np.empty(0, dtype=np.int64)
    keys = rng.standard_exponential(weights.size)
    with np.errstate(divide="ignore"):
        keys = keys / weights
    if m >= weights.size:
        return np.arange(weights.size, dtype=np.int64)
    chosen = np.argpartition(keys, m - 1)[:m]
    return np.sort(chosen).astype(np.int64)


def augment(
    stack: PropagationStack,
    assess: Assessment,
    labels: LabeledNodes,
    train_idx: ArrayLike,
    p: float,
    seed: int | np.random.SeedSequence,
) -> AugmentedPool:
    """Appends error-weighted shallow-depth embeddings to the training pool.

    m = round(p% of N_train) (node, depth < K) pairs are drawn without
    replacement, each weighted by the smoothed error of the node's class.
    """
    if p < 0:
        raise ConfigError(f"augmentation percentage must be >= 0, got {p}")
    train_idx = np.asarray(train_idx, dtype=np.int64).reshape(-1)
    K = stack.K
    n_train = train_idx.size
    y = labels.labels[train_idx]

    m = math.floor(p / 100.0 * n_train + 0.5)
    if m > 0 and K == 0:
        raise ConfigError("augmentation needs K >= 1 when p > 0")
    warnings: list[str] = []
    num_candidates = n_train * K
    if m > num_candidates:
        message = (
            f"requested {m} augmented rows but only {num_candidates}"
            f" (node, depth) candidates exist; sampling all of them"
        )
        logger.warning(message)
        warnings.append(message)
        m = num_candidates

    # Candidate c is (train position c // K, depth c % K)
    rng = np.random.default_rng(seed)
    candidate_weights = np.repeat(assess.class_errors[y], K)
    chosen = weighted_sample_without_replacement(candidate_weights, m, rng)
    positions, depths = np.divmod(chosen, K) if K else (chosen, chosen)

    sampled = np.empty((m, stack.last.shape[1]))
    for depth in range(K):
        hit = depths == depth
        sampled[hit] = stack.layers[depth][train_idx[positions[hit]]]

    return AugmentedPool(
        embeddings=np.vstack([stack.last[train_idx], sampled]),
        labels=np.concatenate([y, y[positions]]),
        confidence=np.concatenate(
            [assess.confidence[:, K], assess.confidence[positions, depths]]
        ),
        origin_node=np.concatenate([train_idx, train_idx[positions]]),
        origin_depth=np.concatenate(
            [np.full(n_train, K, dtype=np.int64), depths.astype(np.int64)]
        ),
        num_sampled=m,
        warnings=tuple(warnings),
    )
