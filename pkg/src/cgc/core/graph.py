"""Graph containers and the normalized propagation operator.

Every other stage works on these types: a symmetric CSR adjacency without
stored self-loops, its symmetric normalization D^-1/2 (A + I) D^-1/2, the
labelled node set and the dataset bundle that ties them to features and
split masks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.sparse as sp
from numpy.typing import ArrayLike, NDArray

from cgc.core.errors import (
    MaskOverlapError,
    MissingClassError,
    StructuralError,
)

Task = Literal["transductive", "inductive"]
FloatArray = NDArray[np.float64]
IndexArray = NDArray[np.int64]


def _as_index_array(values: ArrayLike) -> IndexArray:
    return np.ascontiguousarray(values, dtype=np.int64).reshape(-1)


@dataclass(frozen=True, eq=False)
class SparseAdjacency:
    """Symmetric adjacency matrix in canonical CSR form.

    Duplicate entries are merged by summing their weights, column indices
    are sorted within each row, and self-loops are rejected; the diagonal
    only enters through `normalize`.
    """

    matrix: sp.csr_matrix

    def __post_init__(self) -> None:
        matrix = sp.csr_matrix(self.matrix, dtype=np.float64, copy=True)
        if matrix.shape[0] != matrix.shape[1]:
            raise StructuralError(
                f"adjacency must be square, got shape {matrix.shape}"
            )
        matrix.sum_duplicates()
        matrix.sort_indices()
        matrix.eliminate_zeros()

        if not np.all(np.isfinite(matrix.data)):
            raise StructuralError("adjacency holds non-finite edge weights")

        loops = np.flatnonzero(matrix.diagonal())
        if loops.size:
            raise StructuralError(
                f"adjacency stores a self-loop at node {int(loops[0])}"
            )

        mismatch = abs(matrix - matrix.T).tocoo()
        mismatch.eliminate_zeros()
        if mismatch.nnz:
            first = np.lexsort((mismatch.col, mismatch.row))[0]
            i, j = int(mismatch.row[first]), int(mismatch.col[first])
            raise StructuralError(
                f"adjacency is not symmetric: edge ({i}, {j}) has weight"
                f" {matrix[i, j]} but ({j}, {i}) has weight {matrix[j, i]}"
            )

        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def from_edges(
        cls,
        num_nodes: int,
        rows: ArrayLike,
        cols: ArrayLike,
        values: ArrayLike | None = None,
        *,
        symmetrize: bool = False,
    ) -> SparseAdjacency:
        """Builds an adjacency from an edge list.

        With `symmetrize`, the edges are treated as an undirected, unweighted
        listing: each pair is kept once in both directions and self-loops
        are dropped.
        """
        src = _as_index_array(rows)
        dst = _as_index_array(cols)
        if src.shape != dst.shape:
            raise StructuralError("edge endpoint arrays differ in length")
        if num_nodes < 0:
            raise StructuralError("num_nodes must be non-negative")
        if src.size:
            bad = np.flatnonzero(
                (src < 0) | (src >= num_nodes) | (dst < 0) | (dst >= num_nodes)
            )
            if bad.size:
                k = int(bad[0])
                raise StructuralError(
                    f"edge ({int(src[k])}, {int(dst[k])}) references a node"
                    f" outside [0, {num_nodes})"
                )

        if symmetrize:
            if values is not None:
                raise StructuralError(
                    "symmetrized edge lists are unweighted"
                )
            keep = src != dst
            lo = np.minimum(src[keep], dst[keep])
            hi = np.maximum(src[keep], dst[keep])
            pairs = np.unique(np.stack([lo, hi], axis=1), axis=0)
            src = np.concatenate([pairs[:, 0], pairs[:, 1]])
            dst = np.concatenate([pairs[:, 1], pairs[:, 0]])
            data = np.ones(src.size, dtype=np.float64)
        elif values is None:
            data = np.ones(src.size, dtype=np.float64)
        else:
            data = np.asarray(values, dtype=np.float64).reshape(-1)
            if data.size != src.size:
                raise StructuralError("edge weights differ in length")

        matrix = sp.csr_matrix(
            (data, (src, dst)), shape=(num_nodes, num_nodes)
        )
        return cls(matrix)

    @classmethod
    def from_csr(
        cls,
        num_nodes: int,
        row_offsets: ArrayLike,
        col_indices: ArrayLike,
        values: ArrayLike | None = None,
    ) -> SparseAdjacency:
        offsets = _as_index_array(row_offsets)
        indices = _as_index_array(col_indices)
        if offsets.size != num_nodes + 1 or offsets[0] != 0:
            raise StructuralError(
                f"row offsets must have length {num_nodes + 1} and start at 0"
            )
        if np.any(np.diff(offsets) < 0) or offsets[-1] != indices.size:
            raise StructuralError("row offsets are not a valid CSR layout")
        if indices.size and (indices.min() < 0 or indices.max() >= num_nodes):
            raise StructuralError(
                f"column index outside [0, {num_nodes})"
            )
        data = (
            np.ones(indices.size, dtype=np.float64)
            if values is None
            else np.asarray(values, dtype=np.float64)
        )
        matrix = sp.csr_matrix(
            (data, indices, offsets), shape=(num_nodes, num_nodes)
        )
        return cls(matrix)

    @classmethod
    def empty(cls, num_nodes: int) -> SparseAdjacency:
        return cls(sp.csr_matrix((num_nodes, num_nodes), dtype=np.float64))

    @property
    def num_nodes(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def row_offsets(self) -> IndexArray:
        return self.matrix.indptr.astype(np.int64)

    @property
    def col_indices(self) -> IndexArray:
        return self.matrix.indices.astype(np.int64)

    @property
    def values(self) -> FloatArray | None:
        """Edge weights, or None when every edge has weight 1."""
        if self.is_binary:
            return None
        return np.asarray(self.matrix.data, dtype=np.float64)

    @property
    def is_binary(self) -> bool:
        return bool(np.all(self.matrix.data == 1.0))

    @property
    def num_edges(self) -> int:
        """Number of undirected edges."""
        return int(self.matrix.nnz // 2)

    def degrees(self) -> FloatArray:
        return np.asarray(self.matrix.sum(axis=1), dtype=np.float64).ravel()

    def to_dense(self) -> FloatArray:
        return np.asarray(self.matrix.toarray(), dtype=np.float64)


@dataclass(frozen=True, eq=False)
class NormalizedAdjacency:
    matrix: sp.csr_matrix
    source: SparseAdjacency

    @property
    def num_nodes(self) -> int:
        return int(self.matrix.shape[0])

    @classmethod
    def identity(cls, num_nodes: int) -> NormalizedAdjacency:
        return normalize(SparseAdjacency.empty(num_nodes))

    def to_dense(self) -> FloatArray:
        return np.asarray(self.matrix.toarray(), dtype=np.float64)


def normalize(adj: SparseAdjacency) -> NormalizedAdjacency:
    """Returns D^-1/2 (A + I) D^-1/2 with D the degree matrix of A + I.

    Entries are computed as a_ij / sqrt(d_i * d_j) so isolated nodes get a
    diagonal of exactly 1 and the result does not depend on evaluation
    order.
    """
    n = adj.num_nodes
    augmented = (adj.matrix + sp.identity(n, format="csr")).tocsr()
    augmented.sort_indices()
    degree = np.asarray(augmented.sum(axis=1), dtype=np.float64).ravel()

    rows = np.repeat(np.arange(n), np.diff(augmented.indptr))
    data = augmented.data / np.sqrt(degree[rows] * degree[augmented.indices])
    matrix = sp.csr_matrix(
        (data, augmented.indices.copy(), augmented.indptr.copy()),
        shape=(n, n),
    )
    return NormalizedAdjacency(matrix=matrix, source=adj)


def spmm(adj: NormalizedAdjacency, feats: ArrayLike) -> FloatArray:
    """Sparse-dense product; rows of the output are computed independently."""
    dense = np.asarray(feats, dtype=np.float64)
    if dense.ndim != 2 or dense.shape[0] != adj.num_nodes:
        raise StructuralError(
            f"cannot multiply a {adj.num_nodes}x{adj.num_nodes} adjacency"
            f" with a feature matrix of shape {dense.shape}"
        )
    return np.asarray(adj.matrix @ dense, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class LabeledNodes:
    labels: IndexArray
    num_classes: int

    def __post_init__(self) -> None:
        labels = _as_index_array(self.labels)
        if self.num_classes < 1:
            raise StructuralError("num_classes must be at least 1")
        if labels.size and (
            labels.min() < 0 or labels.max() >= self.num_classes
        ):
            raise StructuralError(
                f"labels must lie in [0, {self.num_classes})"
            )
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return int(self.labels.size)

    @property
    def one_hot(self) -> FloatArray:
        return np.eye(self.num_classes, dtype=np.float64)[self.labels]

    def class_counts(self, idx: ArrayLike | None = None) -> IndexArray:
        subset = self.labels if idx is None else self.labels[idx]
        return np.bincount(subset, minlength=self.num_classes).astype(
            np.int64
        )

    def require_coverage(self, idx: ArrayLike) -> None:
        """Raises if some class has no node among `idx`."""
        missing = np.flatnonzero(self.class_counts(idx) == 0)
        if missing.size:
            raise MissingClassError(
                "classes without a training node: "
                + ", ".join(str(int(i)) for i in missing)
            )


@dataclass(frozen=True, eq=False)
class Dataset:
    adjacency: SparseAdjacency
    features: FloatArray
    labels: LabeledNodes
    train_idx: IndexArray
    val_idx: IndexArray
    test_idx: IndexArray
    task: Task = "transductive"
    name: str = "dataset"

    def __post_init__(self) -> None:
        n = self.adjacency.num_nodes
        features = np.ascontiguousarray(self.features, dtype=np.float64)
        if features.ndim != 2 or features.shape[0] != n:
            raise StructuralError(
                f"features must have {n} rows, got shape {features.shape}"
            )
        if not np.all(np.isfinite(features)):
            raise StructuralError("features hold non-finite values")
        if len(self.labels) != n:
            raise StructuralError(
                f"expected {n} labels, got {len(self.labels)}"
            )
        if self.task not in ("transductive", "inductive"):
            raise StructuralError(f"unknown task kind {self.task!r}")

        masks = {}
        for split in ("train_idx", "val_idx", "test_idx"):
            idx = np.unique(_as_index_array(getattr(self, split)))
            if idx.size and (idx[0] < 0 or idx[-1] >= n):
                raise StructuralError(
                    f"{split} holds node indices outside [0, {n})"
                )
            masks[split] = idx
        seen = np.zeros(n, dtype=np.int64)
        for idx in masks.values():
            seen[idx] += 1
        if np.any(seen > 1):
            raise MaskOverlapError(
                f"node {int(np.flatnonzero(seen > 1)[0])} belongs to more"
                " than one split"
            )

        object.__setattr__(self, "features", features)
        for split, idx in masks.items():
            object.__setattr__(self, split, idx)

    @property
    def num_nodes(self) -> int:
        return self.adjacency.num_nodes

    @property
    def num_features(self) -> int:
        return int(self.features.shape[1])

    @property
    def num_classes(self) -> int:
        return self.labels.num_classes


def induced_subgraph(ds: Dataset, nodes: ArrayLike) -> Dataset:
    """Restricts `ds` to `nodes`, relabelled in ascending original order."""
    keep = np.unique(_as_index_array(nodes))
    if keep.size == 0:
        raise StructuralError("cannot induce a subgraph on an empty node set")
    if keep[0] < 0 or keep[-1] >= ds.num_nodes:
        raise StructuralError(
            f"subgraph nodes must lie in [0, {ds.num_nodes})"
        )

    position = np.full(ds.num_nodes, -1, dtype=np.int64)
    position[keep] = np.arange(keep.size)

    def _restrict(idx: IndexArray) -> IndexArray:
        mapped = position[idx]
        return mapped[mapped >= 0]

    sub = ds.adjacency.matrix[keep][:, keep]
    return Dataset(
        adjacency=SparseAdjacency(sub),
        features=ds.features[keep],
        labels=LabeledNodes(ds.labels.labels[keep], ds.num_classes),
        train_idx=_restrict(ds.train_idx),
        val_idx=_restrict(ds.val_idx),
        test_idx=_restrict(ds.test_idx),
        task=ds.task,
        name=ds.name,
    )
