from typing import Literal, TypedDict

from pydantic import BaseModel, Field

from cgc.datasets.utils.config import FORMAT_VERSION


class DatasetMeta(BaseModel):
    name: str = "dataset"
    num_nodes: int = Field(ge=0)
    num_features: int = Field(ge=0)
    num_classes: int = Field(ge=1)
    task: Literal["transductive", "inductive"] = "transductive"
    format_version: int = FORMAT_VERSION
    weighted: bool = False


class DatasetStats(TypedDict):
    name: str
    num_nodes: int
    num_edges: int
    num_features: int
    num_classes: int
    num_train: int
    num_val: int
    num_test: int
    task: str
    edge_homophily: float | None


class SplitLines(TypedDict):
    train: list[str]
    val: list[str]
    test: list[str]
