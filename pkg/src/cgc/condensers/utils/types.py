from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal, Self

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    TypeAdapter,
    ValidationError,
    model_validator,
)

from cgc.condensers.utils.config import (
    DEFAULT_ALPHA,
    DEFAULT_K,
    DEFAULT_P,
    DEFAULT_PPR_BETA,
    DEFAULT_SEED,
    DEFAULT_TAU,
    DEFAULT_THRESHOLD,
    PRESETS,
)
from cgc.core.errors import ConfigError
from cgc.core.graph import FloatArray, IndexArray
from cgc.evaluators.utils.types import EvalConfig

Preset = Literal[
    "cgc", "cgc_x", "simdm", "no_aug", "no_cal", "random_partition"
]
RuleKind = Literal["sgc", "ppr", "mean"]
WeightingMode = Literal["softmax", "linear", "uniform"]
ClusterMethod = Literal["kmeans", "random"]

JSON_OBJECT = TypeAdapter(dict[str, Any])


@dataclass(frozen=True)
class PropagationRule:
    kind: RuleKind = "sgc"
    beta: float = DEFAULT_PPR_BETA

    def __post_init__(self) -> None:
        if self.kind not in ("sgc", "ppr", "mean"):
            raise ConfigError(f"unknown propagation rule {self.kind!r}")
        if not 0.0 <= self.beta <= 1.0:
            raise ConfigError(f"ppr beta must lie in [0, 1], got {self.beta}")


@dataclass(frozen=True, eq=False)
class PropagationStack:
    """H^(0) ... H^(K); layers[0] is the input feature matrix."""

    layers: tuple[FloatArray, ...]
    rule: PropagationRule

    @property
    def K(self) -> int:
        return len(self.layers) - 1

    @property
    def last(self) -> FloatArray:
        return self.layers[-1]


@dataclass(frozen=True, eq=False)
class Assessment:
    weights: FloatArray
    mean_stack: FloatArray
    train_idx: IndexArray
    confidence: FloatArray  # (train position, depth), clamped to [0, 1]
    raw_class_errors: FloatArray
    class_errors: FloatArray  # Laplace-smoothed


@dataclass(frozen=True, eq=False)
class AugmentedPool:
    """Base rows (depth K, one per training node) followed by sampled rows."""

    embeddings: FloatArray
    labels: IndexArray
    confidence: FloatArray
    origin_node: IndexArray
    origin_depth: IndexArray
    num_sampled: int
    warnings: tuple[str, ...] = ()

    @property
    def size(self) -> int:
        return int(self.labels.size)


@dataclass(frozen=True, eq=False)
class CondensedLabelPlan:
    sizes: IndexArray

    @property
    def total(self) -> int:
        return int(self.sizes.sum())

    @property
    def num_classes(self) -> int:
        return int(self.sizes.size)

    @property
    def offsets(self) -> IndexArray:
        return np.concatenate([[0], np.cumsum(self.sizes)]).astype(np.int64)

    @property
    def condensed_labels(self) -> IndexArray:
        return np.repeat(np.arange(self.num_classes), self.sizes)


@dataclass(frozen=True, eq=False)
class ClusterResult:
    assignments: IndexArray
    centroids: FloatArray
    objective_history: tuple[float, ...]
    repairs: int = 0


@dataclass(frozen=True, eq=False)
class PartitionPlan:
    """Assignments index rows of `embeddings` (H'), grouped by class."""

    assignments: IndexArray
    weights: FloatArray
    embeddings: FloatArray
    labels: IndexArray
    sizes: IndexArray
    objective: float
    warnings: tuple[str, ...] = field(default=())


class PipelineConfig(BaseModel):
    """Resolved condensation settings.

    The preset fills in every field the caller did not set explicitly.
    """

    dataset: str | None = None
    preset: Preset = "cgc_x"
    ratio: float | None = Field(default=None, gt=0, le=1)
    num_condensed: int | None = Field(default=None, ge=1)
    K: int = Field(default=DEFAULT_K, ge=0)
    rule: RuleKind = "sgc"
    beta: float = Field(default=DEFAULT_PPR_BETA, ge=0, le=1)
    p: float = Field(default=DEFAULT_P, ge=0)
    tau: float = Field(default=DEFAULT_TAU, gt=0)
    mode: WeightingMode = "softmax"
    method: ClusterMethod = "kmeans"
    structure: Literal["identity", "adjacency"] = "identity"
    threshold: float = Field(default=DEFAULT_THRESHOLD, ge=0, lt=1)
    alpha: float = Field(default=DEFAULT_ALPHA, ge=0)
    jitter: float | None = Field(default=None, gt=0)
    seed: int = Field(default=DEFAULT_SEED, ge=0)
    workers: int = Field(default=1, ge=1)
    eval: EvalConfig = Field(default_factory=EvalConfig)

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _apply_preset(self) -> Self:
        if self.ratio is not None and self.num_condensed is not None:
            raise ValueError("set either ratio or num_condensed, not both")
        explicit = set(self.model_fields_set)
        for key, value in PRESETS[self.preset].items():
            if key not in explicit:
                setattr(self, key, value)
        return self

    @property
    def propagation_rule(self) -> PropagationRule:
        return PropagationRule(kind=self.rule, beta=self.beta)

    @classmethod
    def from_sources(
        cls, path: str | Path | None = None, **overrides: Any
    ) -> PipelineConfig:
        """Merges a JSON config file with flag overrides.

        A provenance file is accepted too; its `config` entry is used. Every
        field of such a snapshot counts as explicit, so it cannot be
        replayed under a different preset.
        """
        payload: dict[str, Any] = {}
        if path is not None:
            try:
                payload = JSON_OBJECT.validate_json(Path(path).read_bytes())
            except OSError as exc:
                raise ConfigError(f"cannot read config {path}: {exc}") from exc
            except ValidationError as exc:
                raise ConfigError(
                    f"config {path} must hold a JSON object: {exc}"
                ) from exc
            snapshot = payload.get("config")
            if isinstance(snapshot, dict):
                preset = overrides.get("preset")
                recorded = snapshot.get("preset", "cgc_x")
                if preset is not None and preset != recorded:
                    raise ConfigError(
                        f"provenance {path} was condensed with preset"
                        f" {recorded!r}; replay it without --preset"
                        f" {preset} or start from a config file"
                    )
                payload = snapshot
        payload.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls.model_validate(payload)
        except ValidationError as exc:
            raise ConfigError(str(exc)) from exc
