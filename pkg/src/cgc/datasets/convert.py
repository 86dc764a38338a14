"""Converters from published raw forms into `Dataset` objects."""

from __future__ import annotations

import logging
import pickle
from pathlib import Path
from typing import TYPE_CHECKING, cast

import numpy as np
import scipy.sparse as sp

from cgc.core.errors import DatasetFormatError, ParseError, StructuralError
from cgc.core.graph import Dataset, LabeledNodes, SparseAdjacency, Task
from cgc.datasets.utils.config import PLANETOID_NUM_VAL, PLANETOID_PARTS

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator

    from numpy.typing import NDArray

    from cgc.datasets.utils.types import DatasetStats, SplitLines

logger = logging.getLogger()


def _content_lines(lines: Iterable[str]) -> Iterator[tuple[int, str]]:
    """Yields (line number, stripped text), skipping blanks and comments."""
    for number, line in enumerate(lines, start=1):
        text = line.strip()
        if text and not text.startswith("#"):
            yield number, text


def _parse_ints(lines: Iterable[str], what: str) -> NDArray[np.int64]:
    values = []
    for number, text in _content_lines(lines):
        for token in text.replace(",", " ").split():
            try:
                values.append(int(token))
            except ValueError as exc:
                raise ParseError(
                    f"{what} line {number}: {token!r} is not an integer"
                ) from exc
    return np.asarray(values, dtype=np.int64)


def _parse_features(lines: Iterable[str]) -> NDArray[np.float64]:
    rows: list[list[float]] = []
    for number, text in _content_lines(lines):
        row = []
        for token in text.replace(",", " ").split():
            try:
                row.append(float(token))
            except ValueError as exc:
                raise ParseError(
                    f"features line {number}: non-numeric value {token!r}"
                ) from exc
        if rows and len(row) != len(rows[0]):
            raise ParseError(
                f"features line {number}: expected {len(rows[0])} values,"
                f" got {len(row)}"
            )
        rows.append(row)
    return np.asarray(rows, dtype=np.float64)


def _parse_edges(
    lines: Iterable[str],
) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    src, dst = [], []
    for number, text in _content_lines(lines):
        tokens = text.replace(",", " ").split()
        if len(tokens) != 2:
            raise ParseError(f"edges line {number}: expected 'u v'")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError as exc:
            raise ParseError(
                f"edges line {number}: node ids must be integers"
            ) from exc
        src.append(u)
        dst.append(v)
    return np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64)


def convert_edgelist(
    edges: Iterable[str],
    features: Iterable[str],
    labels: Iterable[str],
    splits: SplitLines,
    task: Task = "transductive",
    name: str = "dataset",
    num_classes: int | None = None,
) -> Dataset:
    """Builds a dataset from text: one 'u v' edge per line, one feature row
    and one label per node, and one index list per split.

    Edges are symmetrized and deduplicated; self-loops are dropped.
    """
    feats = _parse_features(features)
    num_nodes = feats.shape[0]
    node_labels = _parse_ints(labels, "labels")
    if node_labels.size != num_nodes:
        raise ParseError(
            f"got {node_labels.size} labels for {num_nodes} feature rows"
        )
    if node_labels.size and node_labels.min() < 0:
        raise ParseError("labels must be non-negative")
    if num_classes is None:
        num_classes = int(node_labels.max()) + 1 if node_labels.size else 1

    src, dst = _parse_edges(edges)
    loops = int(np.count_nonzero(src == dst))
    if loops:
        logger.warning(f"Dropped {loops} self-loops while converting {name}")

    adjacency = SparseAdjacency.from_edges(
        num_nodes, src, dst, symmetrize=True
    )
    return Dataset(
        adjacency=adjacency,
        features=feats,
        labels=LabeledNodes(node_labels, num_classes),
        train_idx=_parse_ints(splits["train"], "train split"),
        val_idx=_parse_ints(splits["val"], "val split"),
        test_idx=_parse_ints(splits["test"], "test split"),
        task=task,
        name=name,
    )


def _load_planetoid_part(raw_dir: Path, name: str, part: str) -> object:
    path = raw_dir / f"ind.{name}.{part}"
    try:
        with path.open("rb") as f:
            return pickle.load(f, encoding="latin1")
    except OSError as exc:
        raise DatasetFormatError(f"missing Planetoid file {path}") from exc


def convert_planetoid(
    raw_dir: str | Path, name: str, normalize_features: bool = True
) -> Dataset:
    """Converts the published `ind.<name>.*` Planetoid files.

    Reproduces the public split: train is the first |y| nodes, val the next
    500, test the listed test index. Citeseer's test index has gaps (isolated
    papers without features); those rows are zero-padded.
    """
    raw_dir = Path(raw_dir)
    parts = {
        part: _load_planetoid_part(raw_dir, name, part)
        for part in PLANETOID_PARTS
    }
    graph = cast(dict[int, list[int]], parts["graph"])
    index_path = raw_dir / f"ind.{name}.test.index"
    try:
        with index_path.open("r", encoding="utf-8") as f:
            test_order = _parse_ints(f, "test index")
    except OSError as exc:
        raise DatasetFormatError(
            f"missing Planetoid file {index_path}"
        ) from exc
    test_range = np.sort(test_order)

    tx = sp.csr_matrix(parts["tx"])
    ty = np.asarray(parts["ty"])
    if name == "citeseer":
        full_range = np.arange(test_range.min(), test_range.max() + 1)
        padded_x = sp.lil_matrix((full_range.size, tx.shape[1]))
        padded_x[test_range - test_range.min(), :] = tx
        tx = padded_x.tocsr()
        padded_y = np.zeros((full_range.size, ty.shape[1]))
        padded_y[test_range - test_range.min(), :] = ty
        ty = padded_y

    feats = sp.vstack([sp.csr_matrix(parts["allx"]), tx]).tolil()
    feats[test_order, :] = feats[test_range, :]
    dense = np.asarray(feats.todense(), dtype=np.float64)
    one_hot = np.vstack([np.asarray(parts["ally"]), ty])
    one_hot[test_order, :] = one_hot[test_range, :]

    if normalize_features:
        row_sums = dense.sum(axis=1, keepdims=True)
        np.divide(dense, row_sums, out=dense, where=row_sums != 0)

    num_nodes = dense.shape[0]
    src = [int(u) for u, neighbours in graph.items() for _ in neighbours]
    dst = [int(v) for neighbours in graph.values() for v in neighbours]
    keep = [
        k for k, (u, v) in enumerate(zip(src, dst, strict=True))
        if u < num_nodes and v < num_nodes
    ]
    if len(keep) != len(src):
        logger.warning(
            f"Dropped {len(src) - len(keep)} {name} edges to nodes without"
            " features"
        )
    try:
        adjacency = SparseAdjacency.from_edges(
            num_nodes,
            np.asarray(src)[keep],
            np.asarray(dst)[keep],
            symmetrize=True,
        )
    except StructuralError as exc:
        raise DatasetFormatError(f"malformed {name} graph: {exc}") from exc

    num_train = np.asarray(parts["y"]).shape[0]
    return Dataset(
        adjacency=adjacency,
        features=dense,
        labels=LabeledNodes(one_hot.argmax(axis=1), one_hot.shape[1]),
        train_idx=np.arange(num_train),
        val_idx=np.arange(num_train, num_train + PLANETOID_NUM_VAL),
        test_idx=test_range,
        task="transductive",
        name=name,
    )


def export_edgelist(ds: Dataset) -> Iterator[str]:
    """Yields canonical 'u v' lines with u < v, sorted."""
    upper = sp.triu(ds.adjacency.matrix, k=1).tocoo()
    order = np.lexsort((upper.col, upper.row))
    for u, v in zip(upper.row[order], upper.col[order], strict=True):
        yield f"{int(u)} {int(v)}"


def describe_dataset(ds: Dataset) -> DatasetStats:
    """Size, split and homophily statistics of a dataset."""
    upper = sp.triu(ds.adjacency.matrix, k=1).tocoo()
    labels = ds.labels.labels
    homophily = (
        float(np.mean(labels[upper.row] == labels[upper.col]))
        if upper.nnz
        else None
    )
    return {
        "name": ds.name,
        "num_nodes": ds.num_nodes,
        "num_edges": ds.adjacency.num_edges,
        "num_features": ds.num_features,
        "num_classes": ds.num_classes,
        "num_train": int(ds.train_idx.size),
        "num_val": int(ds.val_idx.size),
        "num_test": int(ds.test_idx.size),
        "task": ds.task,
        "edge_homophily": homophily,
    }
