from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field

from cgc.core.graph import FloatArray, IndexArray


class CheckReport(BaseModel):
    """Outcome of one numerical check; `residual` is compared against
    `tolerance` on the scale the check documents.
    """

    name: str
    passed: bool
    residual: float
    tolerance: float
    draws: int = 1
    details: dict[str, float] = Field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class RandomInstance:
    """Original embeddings Z (n x d) and condensed embeddings Z' (n' x d)
    with their labels; `theta` is one draw of the relay parameters.
    """

    Z: FloatArray
    labels: IndexArray
    Z_prime: FloatArray
    labels_prime: IndexArray
    theta: FloatArray
    num_classes: int

    @property
    def Y(self) -> FloatArray:
        return np.eye(self.num_classes)[self.labels]

    @property
    def Y_prime(self) -> FloatArray:
        return np.eye(self.num_classes)[self.labels_prime]
