"""Reading and writing dataset directories and condensed artifacts.

A directory holds `meta.json` plus fixed-width little-endian payloads
(features, CSR adjacency, labels, split indices). Condensed artifacts use the
same layout with an extra `provenance.json`; a missing adjacency means the
identity structure.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
from pydantic import ValidationError

from cgc.core.errors import (
    DatasetFormatError,
    SizeMismatchError,
    VersionMismatchError,
)
from cgc.core.graph import Dataset, LabeledNodes, SparseAdjacency
from cgc.core.types import CondensedArtifact, CondensedGraph, ProvenanceRecord
from cgc.datasets.utils.config import (
    ADJ_INDICES_FILE,
    ADJ_OFFSETS_FILE,
    ADJ_VALUES_FILE,
    FEATURE_DTYPE,
    FEATURES_FILE,
    FORMAT_VERSION,
    INDEX_DTYPE,
    LABELS_FILE,
    META_FILE,
    OFFSET_DTYPE,
    PROVENANCE_FILE,
    SPLIT_FILES,
    VALUE_DTYPE,
)
from cgc.datasets.utils.types import DatasetMeta

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

logger = logging.getLogger()


def _write_json(path: Path, payload: dict[str, Any]) -> None:
    with path.open("w", encoding="utf-8") as f:
        json.dump(payload, f, indent=4, sort_keys=True)
        f.write("\n")


def _write_array(path: Path, values: ArrayLike, dtype: str) -> None:
    np.ascontiguousarray(values).astype(dtype).tofile(path)


def _read_array(path: Path, dtype: str, expected: int | None) -> NDArray[Any]:
    if not path.is_file():
        raise DatasetFormatError(f"missing payload file {path}")
    itemsize = np.dtype(dtype).itemsize
    size = path.stat().st_size
    wrong_size = expected is not None and size != expected * itemsize
    if size % itemsize or wrong_size:
        wanted = "a multiple of" if expected is None else "exactly"
        raise SizeMismatchError(
            f"{path.name} holds {size} bytes, expected {wanted}"
            f" {itemsize if expected is None else expected * itemsize}"
        )
    return np.fromfile(path, dtype=dtype)


def _write_payload(
    path: Path,
    meta: DatasetMeta,
    features: ArrayLike,
    labels: ArrayLike,
    adjacency: SparseAdjacency | None,
    splits: dict[str, ArrayLike],
) -> None:
    path.mkdir(parents=True, exist_ok=True)
    _write_json(path / META_FILE, meta.model_dump(mode="json"))
    _write_array(path / FEATURES_FILE, features, FEATURE_DTYPE)
    _write_array(path / LABELS_FILE, labels, INDEX_DTYPE)
    for split, file_name in SPLIT_FILES.items():
        _write_array(path / file_name, splits[split], INDEX_DTYPE)

    # Stale structure files would turn an identity artifact into a graph
    for file_name in (ADJ_OFFSETS_FILE, ADJ_INDICES_FILE, ADJ_VALUES_FILE):
        (path / file_name).unlink(missing_ok=True)
    if adjacency is not None:
        _write_array(
            path / ADJ_OFFSETS_FILE, adjacency.row_offsets, OFFSET_DTYPE
        )
        _write_array(
            path / ADJ_INDICES_FILE, adjacency.col_indices, INDEX_DTYPE
        )
        if meta.weighted:
            _write_array(
                path / ADJ_VALUES_FILE, adjacency.matrix.data, VALUE_DTYPE
            )


def _read_meta(path: Path) -> DatasetMeta:
    if not path.is_dir():
        raise DatasetFormatError(f"dataset directory {path} does not exist")
    try:
        raw = json.loads((path / META_FILE).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DatasetFormatError(f"unreadable {META_FILE} in {path}") from exc

    found = raw.get("format_version") if isinstance(raw, dict) else None
    if found != FORMAT_VERSION:
        raise VersionMismatchError(
            f"{path} has format_version {found}, expected {FORMAT_VERSION}"
        )
    try:
        return DatasetMeta.model_validate(raw)
    except ValidationError as exc:
        raise DatasetFormatError(f"invalid {META_FILE}: {exc}") from exc


def _read_adjacency(path: Path, meta: DatasetMeta) -> SparseAdjacency | None:
    has_offsets = (path / ADJ_OFFSETS_FILE).is_file()
    has_indices = (path / ADJ_INDICES_FILE).is_file()
    if not has_offsets and not has_indices:
        return None
    if has_offsets != has_indices:
        raise DatasetFormatError(
            f"{path} holds only one of {ADJ_OFFSETS_FILE}, {ADJ_INDICES_FILE}"
        )

    offsets = _read_array(
        path / ADJ_OFFSETS_FILE, OFFSET_DTYPE, meta.num_nodes + 1
    )
    indices = _read_array(
        path / ADJ_INDICES_FILE, INDEX_DTYPE, int(offsets[-1])
    )
    values = (
        _read_array(path / ADJ_VALUES_FILE, VALUE_DTYPE, indices.size)
        if meta.weighted
        else None
    )
    return SparseAdjacency.from_csr(meta.num_nodes, offsets, indices, values)


def _read_nodes(
    path: Path, meta: DatasetMeta
) -> tuple[NDArray[np.float64], LabeledNodes]:
    n, d = meta.num_nodes, meta.num_features
    features = _read_array(path / FEATURES_FILE, FEATURE_DTYPE, n * d)
    labels = _read_array(path / LABELS_FILE, INDEX_DTYPE, n)
    return (
        features.reshape(n, d).astype(np.float64),
        LabeledNodes(labels.astype(np.int64), meta.num_classes),
    )


def read_dataset(path: str | Path) -> Dataset:
    """Reads and validates a dataset directory."""
    path = Path(path)
    meta = _read_meta(path)
    features, labels = _read_nodes(path, meta)
    splits = {
        split: _read_array(path / file_name, INDEX_DTYPE, None).astype(
            np.int64
        )
        for split, file_name in SPLIT_FILES.items()
    }
    adjacency = _read_adjacency(path, meta)
    return Dataset(
        adjacency=adjacency or SparseAdjacency.empty(meta.num_nodes),
        features=features,
        labels=labels,
        task=meta.task,
        name=meta.name,
        **splits,
    )


def write_dataset(ds: Dataset, path: str | Path) -> None:
    path = Path(path)
    meta = DatasetMeta(
        name=ds.name,
        num_nodes=ds.num_nodes,
        num_features=ds.num_features,
        num_classes=ds.num_classes,
        task=ds.task,
        weighted=not ds.adjacency.is_binary,
    )
    _write_payload(
        path,
        meta,
        ds.features,
        ds.labels.labels,
        ds.adjacency,
        {
            "train_idx": ds.train_idx,
            "val_idx": ds.val_idx,
            "test_idx": ds.test_idx,
        },
    )
    logger.info(f"Wrote dataset '{ds.name}' ({ds.num_nodes} nodes) to {path}")


def write_artifact(art: CondensedArtifact, path: str | Path) -> None:
    """Writes y', X', the optional A' and the provenance record."""
    path = Path(path)
    graph = art.graph
    meta = DatasetMeta(
        name=f"{art.provenance.source_dataset}-{art.provenance.preset}",
        num_nodes=graph.num_nodes,
        num_features=int(graph.features.shape[1]),
        num_classes=graph.num_classes,
    )
    _write_payload(
        path,
        meta,
        graph.features,
        graph.labels.labels,
        graph.adjacency,
        {
            "train_idx": np.arange(graph.num_nodes),
            "val_idx": np.empty(0, dtype=np.int64),
            "test_idx": np.empty(0, dtype=np.int64),
        },
    )
    _write_json(
        path / PROVENANCE_FILE, art.provenance.model_dump(mode="json")
    )
    logger.info(
        f"Wrote {graph.structure} artifact ({graph.num_nodes} nodes) to {path}"
    )


def read_artifact(path: str | Path) -> CondensedArtifact:
    path = Path(path)
    meta = _read_meta(path)
    features, labels = _read_nodes(path, meta)
    adjacency = _read_adjacency(path, meta)
    try:
        provenance = ProvenanceRecord.model_validate_json(
            (path / PROVENANCE_FILE).read_text(encoding="utf-8")
        )
    except OSError as exc:
        raise DatasetFormatError(
            f"missing {PROVENANCE_FILE} in {path}"
        ) from exc
    except ValidationError as exc:
        raise DatasetFormatError(
            f"invalid {PROVENANCE_FILE}: {exc}"
        ) from exc

    graph = CondensedGraph(
        labels=labels, features=features, adjacency=adjacency
    )
    return CondensedArtifact(graph=graph, provenance=provenance)
