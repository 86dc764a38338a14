import numpy as np
import pytest

from cgc.condensers.pipeline import condensation_input, condense
from cgc.condensers.propagation import propagate
from cgc.condensers.utils.types import PipelineConfig
from cgc.datasets.synthetic import synth_sbm


def test_graphless_condensation_of_a_block_model(sbm):
    """Tests the main success path of graphless condensation."""
    # Act
    artifact = condense(sbm, PipelineConfig(ratio=0.1))

    # Assert: round(0.1 * 120) nodes split evenly over three classes
    graph = artifact.graph
    assert graph.structure == "identity"
    assert graph.num_nodes == 12
    assert graph.features.shape == (12, sbm.num_features)
    np.testing.assert_array_equal(graph.labels.class_counts(), [4, 4, 4])


def test_provenance_records_the_run(sbm):
    """Tests that provenance carries the seed, config and stage timings."""
    artifact = condense(sbm, PipelineConfig(ratio=0.1, seed=3))

    provenance = artifact.provenance
    assert provenance.preset == "cgc_x"
    assert provenance.seed == 3
    assert provenance.source_dataset == "sbm-3x40"
    assert provenance.num_condensed_nodes == 12
    assert provenance.config["ratio"] == 0.1
    assert {"propagate", "assess", "augment", "partition", "total"} <= set(
        provenance.timings_ms
    )


def test_graph_preset_builds_a_binary_adjacency(sbm):
    """Tests that the graph preset generates a binary A' and records its
    parameters.
    """
    # Act
    artifact = condense(sbm, PipelineConfig(preset="cgc", ratio=0.1))

    # Assert
    graph = artifact.graph
    assert graph.structure == "adjacency"
    assert graph.adjacency.is_binary
    assert graph.gen_params == {"threshold": 0.9, "alpha": 1.0, "K": 2}
    assert np.all(np.isfinite(graph.features))
    assert artifact.provenance.structure == "adjacency"


def test_condensation_is_seed_deterministic(sbm):
    """Tests that a seed, or a replayed provenance config, reproduces X'."""
    # Arrange
    cfg = PipelineConfig(ratio=0.1, seed=9)

    # Act
    first = condense(sbm, cfg)
    second = condense(sbm, cfg)
    replayed = condense(
        sbm, PipelineConfig.model_validate(first.provenance.config)
    )

    # Assert
    np.testing.assert_array_equal(first.graph.features, second.graph.features)
    np.testing.assert_array_equal(
        first.graph.features, replayed.graph.features
    )


def test_condensation_does_not_depend_on_workers(sbm):
    """Tests that the worker count leaves X' unchanged."""
    serial = condense(sbm, PipelineConfig(ratio=0.1, workers=1))
    threaded = condense(sbm, PipelineConfig(ratio=0.1, workers=3))

    np.testing.assert_array_equal(
        serial.graph.features, threaded.graph.features
    )


def test_one_node_per_class_reduces_to_class_means(sbm):
    """Tests that one node per class without augmentation gives the class
    means of the deepest embeddings.
    """
    # Arrange
    cfg = PipelineConfig(preset="simdm", num_condensed=3)
    deepest = propagate(sbm, cfg.K).last[sbm.train_idx]
    train_labels = sbm.labels.labels[sbm.train_idx]

    # Act
    graph = condense(sbm, cfg).graph

    # Assert
    for cls in range(3):
        np.testing.assert_allclose(
            graph.features[cls],
            deepest[train_labels == cls].mean(axis=0),
            rtol=0.0,
            atol=1e-12,
        )


def test_inductive_datasets_condense_their_training_graph():
    """Tests that inductive datasets condense their training subgraph."""
    # Arrange
    ds = synth_sbm(3, 40, 0.3, 0.02, 8, 3.0, seed=0, task="inductive")

    # Act
    source = condensation_input(ds)
    artifact = condense(ds, PipelineConfig(ratio=0.25))

    # Assert: the ratio applies to the 72 training nodes
    assert source.num_nodes == 72
    assert source.train_idx.size == 72
    assert artifact.graph.num_nodes == 18


def test_clamped_augmentation_is_reported(sbm):
    """Tests that an oversized augmentation budget leaves a warning."""
    artifact = condense(sbm, PipelineConfig(ratio=0.1, K=1, p=500))

    assert len(artifact.provenance.warnings) == 1
    assert "candidates" in artifact.provenance.warnings[0]


@pytest.mark.parametrize(
    "preset", ["no_aug", "no_cal", "random_partition", "simdm"]
)
def test_ablation_presets_run_end_to_end(sbm, preset):
    """Tests that each ablation preset produces an artifact."""
    artifact = condense(sbm, PipelineConfig(preset=preset, ratio=0.1))

    assert artifact.graph.num_nodes == 12
    assert artifact.provenance.preset == preset
