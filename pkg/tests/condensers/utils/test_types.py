import json

import pytest
from pydantic import ValidationError

from cgc.condensers.utils.types import PipelineConfig
from cgc.core.errors import ConfigError


def test_defaults_follow_the_graphless_preset():
    """Tests that an empty config resolves to the graphless preset."""
    cfg = PipelineConfig()

    assert cfg.preset == "cgc_x"
    assert cfg.structure == "identity"
    assert cfg.K == 2
    assert cfg.p == 50.0
    assert cfg.mode == "softmax"


def test_preset_fills_unset_fields():
    """Tests that a preset fills in every field left unset."""
    cfg = PipelineConfig(preset="simdm")

    assert cfg.p == 0.0
    assert cfg.mode == "uniform"
    assert cfg.method == "kmeans"
    assert cfg.structure == "identity"


def test_explicit_fields_beat_the_preset():
    """Tests that explicitly set fields survive the preset."""
    cfg = PipelineConfig(preset="simdm", p=10.0, structure="adjacency")

    assert cfg.p == 10.0
    assert cfg.structure == "adjacency"
    assert cfg.mode == "uniform"


def test_propagation_rule_is_built_from_the_fields():
    """Tests that rule and beta combine into a PropagationRule."""
    rule = PipelineConfig(rule="ppr", beta=0.2).propagation_rule

    assert rule.kind == "ppr"
    assert rule.beta == 0.2


def test_ratio_and_node_count_are_exclusive():
    """Tests that ratio and num_condensed cannot both be set."""
    with pytest.raises(ValidationError, match="not both"):
        PipelineConfig(ratio=0.1, num_condensed=10)


def test_from_sources_merges_file_and_overrides(tmp_path):
    """Tests that overrides win over the file and None overrides are
    ignored.
    """
    # Arrange
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"preset": "cgc", "tau": 0.5, "K": 3}))

    # Act
    cfg = PipelineConfig.from_sources(path, K=4, seed=None)

    # Assert
    assert cfg.preset == "cgc"
    assert cfg.structure == "adjacency"
    assert cfg.tau == 0.5
    assert cfg.K == 4
    assert cfg.seed == 0


def test_from_sources_reads_a_provenance_file(tmp_path):
    """Tests that a provenance file replays its recorded config."""
    path = tmp_path / "provenance.json"
    path.write_text(
        json.dumps({"seed": 5, "config": {"preset": "no_aug", "seed": 5}})
    )

    cfg = PipelineConfig.from_sources(path)

    assert cfg.preset == "no_aug"
    assert cfg.p == 0.0
    assert cfg.seed == 5


@pytest.mark.parametrize(
    "payload",
    [
        {"tau": 0.0},
        {"preset": "fancy"},
        {"ratio": 1.5},
        {"colour": "blue"},
        {"eval": {"model": "gat"}},
    ],
)
def test_from_sources_turns_invalid_settings_into_config_errors(
    tmp_path, payload
):
    """Tests that validation failures surface as ConfigError."""
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(payload))

    with pytest.raises(ConfigError):
        PipelineConfig.from_sources(path)


@pytest.mark.parametrize("content", ["{not json", "[1, 2]"])
def test_from_sources_rejects_unreadable_files(tmp_path, content):
    """Tests that malformed JSON and non-object payloads name the file."""
    path = tmp_path / "cfg.json"
    path.write_text(content)

    with pytest.raises(ConfigError, match="cfg.json"):
        PipelineConfig.from_sources(path)


def test_from_sources_reports_a_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        PipelineConfig.from_sources(tmp_path / "absent.json")


def test_from_sources_refuses_to_relabel_a_provenance_snapshot(tmp_path):
    """Tests that a provenance snapshot cannot be replayed under a new
    preset, since its recorded fields would silently win over the preset.
    """
    # Arrange
    path = tmp_path / "provenance.json"
    snapshot = PipelineConfig(preset="cgc_x", seed=3).model_dump(mode="json")
    path.write_text(json.dumps({"seed": 3, "config": snapshot}))

    # Act / Assert
    with pytest.raises(ConfigError, match="condensed with preset 'cgc_x'"):
        PipelineConfig.from_sources(path, preset="simdm")


def test_from_sources_replays_a_snapshot_under_its_own_preset(tmp_path):
    """Tests that naming the recorded preset again is a plain replay."""
    path = tmp_path / "provenance.json"
    snapshot = PipelineConfig(preset="no_cal", seed=3).model_dump(mode="json")
    path.write_text(json.dumps({"seed": 3, "config": snapshot}))

    cfg = PipelineConfig.from_sources(path, preset="no_cal", seed=7)

    assert cfg.model_dump(exclude={"seed"}) == PipelineConfig.model_validate(
        snapshot
    ).model_dump(exclude={"seed"})
    assert cfg.seed == 7


def test_plain_config_files_may_switch_presets(tmp_path):
    """Tests that a hand-written config keeps only its own fields when the
    preset is overridden from the command line.
    """
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"tau": 0.5}))

    cfg = PipelineConfig.from_sources(path, preset="simdm")

    assert cfg.preset == "simdm"
    assert cfg.mode == "uniform"
    assert cfg.tau == 0.5
