from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from cgc.core.errors import ConfigError
from cgc.core.graph import Dataset, LabeledNodes, SparseAdjacency, Task
from cgc.datasets.utils.config import SBM_TRAIN_FRACTION, SBM_VAL_FRACTION

if TYPE_CHECKING:
    from numpy.typing import NDArray

logger = logging.getLogger()


def _sample_block_edges(
    rng: np.random.Generator,
    starts: NDArray[np.int64],
    sizes: NDArray[np.int64],
    p_in: float,
    p_out: float,
) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    """Independent Bernoulli edges per block pair.

    A binomial count followed by a uniform subset of that size is the same
    law as one coin per cell. Diagonal blocks are drawn over the full square
    and keep only cells above the diagonal.
    """
    src, dst = [], []
    num_blocks = sizes.size
    for a in range(num_blocks):
        for b in range(a, num_blocks):
            na, nb = int(sizes[a]), int(sizes[b])
            total = na * nb
            prob = p_in if a == b else p_out
            if total == 0 or prob == 0.0:
                continue
            m = int(rng.binomial(total, prob))
            flat = rng.choice(total, size=m, replace=False).astype(np.int64)
            i, j = np.divmod(flat, nb)
            if a == b:
                upper = i < j
                i, j = i[upper], j[upper]
            src.append(starts[a] + i)
            dst.append(starts[b] + j)
    if not src:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    return np.concatenate(src), np.concatenate(dst)


def _stratified_split(
    rng: np.random.Generator,
    labels: NDArray[np.int64],
    num_classes: int,
    train_per_class: int | None,
) -> tuple[NDArray[np.int64], NDArray[np.int64], NDArray[np.int64]]:
    train, val, test = [], [], []
    for cls in range(num_classes):
        members = rng.permutation(np.flatnonzero(labels == cls))
        n = members.size
        n_train = (
            max(1, round(SBM_TRAIN_FRACTION * n))
            if train_per_class is None
            else train_per_class
        )
        n_val = min(round(SBM_VAL_FRACTION * n), n - n_train)
        train.append(members[:n_train])
        val.append(members[n_train : n_train + n_val])
        test.append(members[n_train + n_val :])
    return (
        np.sort(np.concatenate(train)),
        np.sort(np.concatenate(val)),
        np.sort(np.concatenate(test)),
    )


def synth_sbm(
    classes: int,
    nodes_per_class: int,
    p_in: float,
    p_out: float,
    d: int,
    class_center_scale: float,
    seed: int,
    noise: float = 1.0,
    train_per_class: int | None = None,
    task: Task = "transductive",
) -> Dataset:
    """Generates a stochastic block model graph with one block per class.

    Features are a scaled Gaussian class center plus `noise` times unit
    Gaussian noise. The split is stratified 60/20/20 unless
    `train_per_class` fixes the number of training nodes per class.
    """
    if classes < 1 or nodes_per_class < 1 or d < 1:
        raise ConfigError(
            "classes, nodes_per_class and d must all be at least 1"
        )
    if not 0.0 <= p_out < p_in <= 1.0:
        raise ConfigError(
            f"need 0 <= p_out < p_in <= 1, got p_in={p_in}, p_out={p_out}"
        )
    if noise < 0.0:
        raise ConfigError("noise must be non-negative")
    if train_per_class is not None and not (
        1 <= train_per_class <= nodes_per_class
    ):
        raise ConfigError(
            f"train_per_class must lie in [1, {nodes_per_class}]"
        )

    rng = np.random.default_rng(seed)
    num_nodes = classes * nodes_per_class
    sizes = np.full(classes, nodes_per_class, dtype=np.int64)
    starts = np.arange(classes, dtype=np.int64) * nodes_per_class
    labels = np.repeat(np.arange(classes, dtype=np.int64), nodes_per_class)

    src, dst = _sample_block_edges(rng, starts, sizes, p_in, p_out)
    adjacency = SparseAdjacency.from_edges(
        num_nodes, src, dst, symmetrize=True
    )

    centers = class_center_scale * rng.standard_normal((classes, d))
    features = centers[labels] + noise * rng.standard_normal((num_nodes, d))
    train_idx, val_idx, test_idx = _stratified_split(
        rng, labels, classes, train_per_class
    )
    logger.info(
        f"Generated SBM with {num_nodes} nodes and"
        f" {adjacency.num_edges} edges"
    )
    return Dataset(
        adjacency=adjacency,
        features=features,
        labels=LabeledNodes(labels, classes),
        train_idx=train_idx,
        val_idx=val_idx,
        test_idx=test_idx,
        task=task,
        name=f"sbm-{classes}x{nodes_per_class}",
    )
