from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from cgc.core.errors import StructuralError
from cgc.core.graph import Dataset, induced_subgraph

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from cgc.core.graph import (
        FloatArray,
        IndexArray,
        LabeledNodes,
        SparseAdjacency,
    )
    from cgc.core.types import CondensedGraph


@dataclass(frozen=True, eq=False)
class TrainingView:
    """The graph a model is fitted on; `rows` enter the loss."""

    features: FloatArray
    labels: LabeledNodes
    adjacency: SparseAdjacency | None
    rows: IndexArray


@dataclass(frozen=True, eq=False)
class EvaluationView:
    features: FloatArray
    labels: LabeledNodes
    adjacency: SparseAdjacency
    val_idx: IndexArray
    test_idx: IndexArray


def training_graph(source: CondensedGraph | Dataset) -> TrainingView:
    """Condensed graphs train on every node. An original dataset trains on
    its train mask, inside the train-induced subgraph for inductive tasks.
    """
    if isinstance(source, Dataset):
        ds = source
        if ds.task == "inductive":
            ds = induced_subgraph(ds, ds.train_idx)
        return TrainingView(
            features=ds.features,
            labels=ds.labels,
            adjacency=ds.adjacency,
            rows=ds.train_idx,
        )
    return TrainingView(
        features=source.features,
        labels=source.labels,
        adjacency=source.adjacency,
        rows=np.arange(source.num_nodes, dtype=np.int64),
    )


def evaluation_graph(original: Dataset) -> EvaluationView:
    """Full graph for transductive tasks; the graph induced on the held-out
    validation and test nodes for inductive ones.
    """
    ds = original
    if ds.task == "inductive":
        ds = induced_subgraph(
            ds, np.concatenate([original.val_idx, original.test_idx])
        )
    return EvaluationView(
        features=ds.features,
        labels=ds.labels,
        adjacency=ds.adjacency,
        val_idx=ds.val_idx,
        test_idx=ds.test_idx,
    )


def check_compatible(train: TrainingView, target: EvaluationView) -> None:
    if train.features.shape[1] != target.features.shape[1]:
        raise StructuralError(
            f"trained on {train.features.shape[1]} features but the"
            f" evaluation graph has {target.features.shape[1]}"
        )
    if train.labels.num_classes != target.labels.num_classes:
        raise StructuralError(
            f"trained on {train.labels.num_classes} classes but the"
            f" evaluation graph has {target.labels.num_classes}"
        )


def accuracy(predicted: ArrayLike, expected: ArrayLike) -> float:
    predicted = np.asarray(predicted)
    expected = np.asarray(expected)
    if expected.size == 0:
        raise StructuralError("cannot score an empty node set")
    return float(np.mean(predicted == expected))
