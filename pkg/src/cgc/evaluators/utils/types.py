from typing import Literal

import numpy as np
from pydantic import BaseModel, Field, model_validator

from cgc.condensers.utils.config import DEFAULT_K, DEFAULT_SEED
from cgc.evaluators.utils.config import (
    DEFAULT_DROPOUT,
    DEFAULT_EPOCHS,
    DEFAULT_HIDDEN,
    DEFAULT_LR,
    DEFAULT_REPEATS,
    DEFAULT_RIDGE,
    DEFAULT_WEIGHT_DECAY,
)


class EvalConfig(BaseModel):
    model: Literal["sgc_ridge", "gcn2"] = "gcn2"
    hidden: int = Field(default=DEFAULT_HIDDEN, ge=1)
    lr: float = Field(default=DEFAULT_LR, gt=0)
    weight_decay: float = Field(default=DEFAULT_WEIGHT_DECAY, ge=0)
    dropout: float = Field(default=DEFAULT_DROPOUT, ge=0, lt=1)
    epochs: int = Field(default=DEFAULT_EPOCHS, ge=0)
    repeats: int = Field(default=DEFAULT_REPEATS, ge=1)
    ridge: float = Field(default=DEFAULT_RIDGE, gt=0)
    K: int = Field(default=DEFAULT_K, ge=0)
    seed: int = Field(default=DEFAULT_SEED, ge=0)


class TrainingTrace(BaseModel):
    losses: list[float] = Field(default_factory=list)
    val_accuracies: list[float] = Field(default_factory=list)
    weight_norms: list[float] = Field(default_factory=list)


class EvalReport(BaseModel):
    model: str
    accuracies: list[float]
    mean: float = 0.0
    std: float = 0.0
    wall_clock_ms: list[float] = Field(default_factory=list)
    failures: int = 0
    flags: list[str] = Field(default_factory=list)
    traces: list[TrainingTrace] | None = None

    @model_validator(mode="after")
    def _summarize(self) -> "EvalReport":
        if self.accuracies:
            self.mean = float(np.mean(self.accuracies))
            self.std = float(np.std(self.accuracies))
        return self

    def csv_row(
        self,
        dataset: str,
        preset: str,
        ratio: float | None,
        condense_ms: float | None,
        seed: int,
    ) -> dict[str, object]:
        return {
            "dataset": dataset,
            "preset": preset,
            "ratio": "" if ratio is None else ratio,
            "model": self.model,
            "acc_mean": round(self.mean, 6),
            "acc_std": round(self.std, 6),
            "condense_ms": (
                "" if condense_ms is None else round(condense_ms, 3)
            ),
            "seed": seed,
        }
