import time

import numpy as np
import pytest

from cgc.condensers.pipeline import condense
from cgc.condensers.structure import build_adjacency
from cgc.condensers.utils.types import PipelineConfig
from cgc.core.paths import DATA_DIR
from cgc.datasets.io import read_dataset
from cgc.evaluators.gcn import train_gcn2

pytestmark = [pytest.mark.dataset, pytest.mark.slow]


def _load(name):
    path = DATA_DIR / name
    if not path.is_dir():
        pytest.skip(f"{name} has not been converted into {DATA_DIR}")
    return read_dataset(path)


@pytest.fixture(scope="module")
def cora():
    return _load("cora")


@pytest.fixture(scope="module")
def citeseer():
    return _load("citeseer")


def _timed_condense(ds, cfg):
    start = time.perf_counter()
    artifact = condense(ds, cfg)
    return artifact, time.perf_counter() - start


# --- Tests for the converted datasets ---


def test_cora_matches_the_public_split(cora):
    """Tests the size and split of the converted Cora dataset."""
    assert cora.num_nodes == 2708
    assert cora.num_features == 1433
    assert cora.num_classes == 7
    assert cora.train_idx.size == 140
    assert cora.val_idx.size == 500
    assert cora.test_idx.size == 1000


# --- Tests for condensed accuracy ---


def test_graphless_condensation_of_cora(cora):
    """Tests accuracy and time of graphless condensation on Cora."""
    # Act
    artifact, seconds = _timed_condense(
        cora, PipelineConfig(preset="cgc_x", ratio=0.026)
    )
    report = train_gcn2(artifact.graph, cora)

    # Assert
    assert artifact.graph.num_nodes == 70
    assert artifact.graph.structure == "identity"
    assert seconds <= 5.0
    assert report.mean >= 0.80


def test_graphless_condensation_of_citeseer(citeseer):
    """Tests accuracy of graphless condensation on Citeseer."""
    artifact = condense(
        citeseer, PipelineConfig(preset="cgc_x", ratio=0.018)
    )

    report = train_gcn2(artifact.graph, citeseer)

    assert artifact.graph.num_nodes == 60
    assert report.mean >= 0.69


def test_class_mean_baseline_on_cora(cora):
    """Tests the class-mean baseline on Cora."""
    artifact, seconds = _timed_condense(
        cora, PipelineConfig(preset="simdm", ratio=0.026)
    )

    report = train_gcn2(artifact.graph, cora)

    assert seconds <= 5.0
    assert report.mean >= 0.77


def test_whole_dataset_control(cora):
    """Tests that a GCN on the whole of Cora lands in the expected band."""
    report = train_gcn2(cora, cora)

    assert 0.79 <= report.mean <= 0.83


# --- Tests for condensation speed and structure ---


def test_structure_solve_costs_more_than_graphless(cora):
    """Tests that generating A' costs more time than skipping it."""
    # Act
    graph_run, graph_seconds = _timed_condense(
        cora, PipelineConfig(preset="cgc", ratio=0.026)
    )
    _, graphless_seconds = _timed_condense(
        cora, PipelineConfig(preset="cgc_x", ratio=0.026)
    )

    # Assert
    assert graph_run.graph.structure == "adjacency"
    assert graph_seconds <= 10.0
    assert graphless_seconds < graph_seconds


def test_higher_thresholds_give_sparser_graphs(cora):
    """Tests that raising the threshold only removes edges."""
    embeddings = condense(
        cora, PipelineConfig(preset="cgc_x", ratio=0.026)
    ).graph.features

    dense = build_adjacency(embeddings, 0.80)
    sparse = build_adjacency(embeddings, 0.99)

    assert sparse.num_edges <= dense.num_edges
    assert np.all(sparse.to_dense() <= dense.to_dense())
