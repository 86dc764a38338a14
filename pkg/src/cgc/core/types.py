from __future__ import annotations

from dataclasses import dataclass
from importlib.metadata import PackageNotFoundError, version
from typing import Any, Literal, TypedDict

import numpy as np
from pydantic import BaseModel, Field

from cgc.core.errors import StructuralError
from cgc.core.graph import (
    FloatArray,
    LabeledNodes,
    NormalizedAdjacency,
    SparseAdjacency,
    normalize,
)

Structure = Literal["identity", "adjacency"]


class StructureParams(TypedDict, total=False):
    threshold: float
    alpha: float
    K: int
    jitter: float


def toolkit_version() -> str:
    try:
        return version("cgc")
    except PackageNotFoundError:
        return "0.1.0"


@dataclass(frozen=True, eq=False)
class CondensedGraph:
    """Synthetic labels y', features X' and an optional adjacency A'.

    `adjacency is None` is the graphless variant: consumers treat the
    structure as the identity.
    """

    labels: LabeledNodes
    features: FloatArray
    adjacency: SparseAdjacency | None = None
    gen_params: StructureParams | None = None

    def __post_init__(self) -> None:
        features = np.ascontiguousarray(self.features, dtype=np.float64)
        if features.ndim != 2 or features.shape[0] != len(self.labels):
            raise StructuralError(
                f"condensed features of shape {features.shape} do not match"
                f" {len(self.labels)} condensed labels"
            )
        if not np.all(np.isfinite(features)):
            raise StructuralError("condensed features hold non-finite values")
        if self.adjacency is not None:
            if self.adjacency.num_nodes != len(self.labels):
                raise StructuralError(
                    "condensed adjacency size does not match its labels"
                )
            if not self.adjacency.is_binary:
                raise StructuralError("condensed adjacency must be binary")
        object.__setattr__(self, "features", features)

    @property
    def num_nodes(self) -> int:
        return len(self.labels)

    @property
    def num_classes(self) -> int:
        return self.labels.num_classes

    @property
    def structure(self) -> Structure:
        return "identity" if self.adjacency is None else "adjacency"

    def normalized(self) -> NormalizedAdjacency:
        if self.adjacency is None:
            return NormalizedAdjacency.identity(self.num_nodes)
        return normalize(self.adjacency)


class ProvenanceRecord(BaseModel):
    """Everything needed to reproduce a condensed artifact."""

    config: dict[str, Any]
    seed: int
    preset: str
    timings_ms: dict[str, float] = Field(default_factory=dict)
    toolkit_version: str = Field(default_factory=toolkit_version)
    warnings: list[str] = Field(default_factory=list)
    structure: Structure
    num_condensed_nodes: int
    source_dataset: str


@dataclass(frozen=True, eq=False)
class CondensedArtifact:
    graph: CondensedGraph
    provenance: ProvenanceRecord
