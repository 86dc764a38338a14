"""Closed-form linear probe over the propagation stack.

The probe is fitted on the depth-averaged training embeddings. Its scores
give a per-(node, depth) confidence at the true class and a per-class error
rate that later drives augmentation sampling.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from scipy.linalg import lstsq

from cgc.condensers.utils.types import Assessment
from cgc.core.errors import StructuralError

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from cgc.condensers.utils.types import PropagationStack
    from cgc.core.graph import LabeledNodes


def fit_probe(
    stack: PropagationStack, labels: LabeledNodes, train_idx: ArrayLike
) -> Assessment:
    train_idx = np.asarray(train_idx, dtype=np.int64).reshape(-1)
    if train_idx.size == 0:
        raise StructuralError("the probe needs at least one training node")
    labels.require_coverage(train_idx)

    y = labels.labels[train_idx]
    targets = np.eye(labels.num_classes)[y]
    mean_stack = sum(layer[train_idx] for layer in stack.layers) / (
        stack.K + 1
    )
    # Minimum-norm solution when mean_stack is rank deficient
    weights, *_ = lstsq(mean_stack, targets, lapack_driver="gelsd")

    rows = np.arange(train_idx.size)
    confidence = np.empty((train_idx.size, stack.K + 1))
    for depth, layer in enumerate(stack.layers):
        scores = layer[train_idx] @ weights
        confidence[:, depth] = np.clip(scores[rows, y], 0.0, 1.0)

    predicted = (stack.last[train_idx] @ weights).argmax(axis=1)
    class_sizes = labels.class_counts(train_idx)
    wrong = np.bincount(y[predicted != y], minlength=labels.num_classes)
    return Assessment(
        weights=weights,
        mean_stack=mean_stack,
        train_idx=train_idx,
        confidence=confidence,
        raw_class_errors=wrong / class_sizes,
        class_errors=(wrong + 1.0) / (class_sizes + 2.0),
    )
