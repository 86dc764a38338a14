import logging
import pickle

import numpy as np
import pytest
import scipy.sparse as sp

from cgc.core.errors import DatasetFormatError, ParseError
from cgc.core.graph import Dataset, LabeledNodes, SparseAdjacency
from cgc.datasets.convert import (
    convert_edgelist,
    convert_planetoid,
    describe_dataset,
    export_edgelist,
)
from cgc.datasets.io import read_dataset, write_dataset

# --- Test Data ---
EDGES = ["# u v", "0 1", "1 0", "1 2", "2 2", "", "3 2"]
FEATURES = ["1 0", "0 1", "1 1", "0.5, 0.5"]
LABELS = ["0", "1", "1", "0"]
SPLITS = {"train": ["0 1"], "val": ["2"], "test": ["3"]}


def _write_planetoid(raw_dir, name, test_index, extra_edges=()):
    """Writes a miniature Planetoid dump: 2 labelled training nodes, 508
    more labelled nodes and one test row per entry of `test_index`.
    """
    rng = np.random.default_rng(0)
    num_all = 510
    allx = rng.random((num_all, 4)) + 0.1
    ally = np.eye(2)[np.arange(num_all) % 2]
    tx = rng.random((len(test_index), 4)) + 0.1
    ty = np.eye(2)[np.arange(len(test_index)) % 2]
    graph = {i: [i + 1] for i in range(num_all - 1)}
    graph[0] = [1, *extra_edges]
    parts = {
        "x": sp.csr_matrix(allx[:2]),
        "y": ally[:2],
        "tx": sp.csr_matrix(tx),
        "ty": ty,
        "allx": sp.csr_matrix(allx),
        "ally": ally,
        "graph": graph,
    }
    for part, value in parts.items():
        with open(raw_dir / f"ind.{name}.{part}", "wb") as f:
            pickle.dump(value, f)
    (raw_dir / f"ind.{name}.test.index").write_text(
        "\n".join(str(i) for i in test_index) + "\n"
    )
    return tx


# --- Tests for convert_edgelist ---


def test_convert_edgelist_symmetrizes_and_drops_loops(caplog):
    """Tests the main success path: symmetric edges, dropped loops and
    a warning.
    """
    # Act
    with caplog.at_level(logging.WARNING):
        ds = convert_edgelist(EDGES, FEATURES, LABELS, SPLITS, name="toy")

    # Assert
    assert ds.num_nodes == 4
    assert ds.adjacency.num_edges == 3
    assert ds.num_classes == 2
    np.testing.assert_array_equal(ds.train_idx, [0, 1])
    assert "Dropped 1 self-loops" in caplog.text


@pytest.mark.parametrize(
    "features, labels, message",
    [
        (["1 0", "x 1", "1 1", "0 0"], LABELS, "non-numeric"),
        (["1 0", "0 1 1", "1 1", "0 0"], LABELS, "expected 2 values"),
        (FEATURES, ["0", "1", "1"], "3 labels for 4"),
        (FEATURES, ["0", "1", "one", "0"], "not an integer"),
    ],
)
def test_convert_edgelist_rejects_malformed_input(features, labels, message):
    """Tests that malformed feature and label lines are reported."""
    with pytest.raises(ParseError, match=message):
        convert_edgelist(EDGES, features, labels, SPLITS)


def test_convert_edgelist_rejects_malformed_edge():
    """Tests that an edge line without exactly two ids is reported."""
    with pytest.raises(ParseError, match="expected 'u v'"):
        convert_edgelist(["0 1 2"], FEATURES, LABELS, SPLITS)


def test_export_edgelist_is_canonical():
    """Tests that export yields sorted u < v lines that convert back
    unchanged.
    """
    # Arrange
    ds = convert_edgelist(EDGES, FEATURES, LABELS, SPLITS)

    # Act
    lines = list(export_edgelist(ds))

    # Assert
    assert lines == ["0 1", "1 2", "2 3"]
    again = convert_edgelist(lines, FEATURES, LABELS, SPLITS)
    assert list(export_edgelist(again)) == lines


def test_stored_dataset_exports_its_canonical_edges(tmp_path):
    """Tests that canonical 'u v' lines survive convert, write, read and
    export unchanged.
    """
    # Arrange
    lines = ["0 1", "0 3", "1 2", "2 3"]
    ds = convert_edgelist(lines, FEATURES, LABELS, SPLITS, name="toy")

    # Act
    write_dataset(ds, tmp_path / "toy")
    exported = list(export_edgelist(read_dataset(tmp_path / "toy")))

    # Assert
    assert exported == lines


# --- Tests for describe_dataset ---


def test_describe_dataset(two_cliques):
    """Tests size and homophily statistics of the two-clique fixture."""
    stats = describe_dataset(two_cliques)

    assert stats["num_nodes"] == 8
    assert stats["num_edges"] == 12
    assert stats["num_train"] == 4
    assert stats["edge_homophily"] == 1.0


def test_describe_edgeless_dataset_has_no_homophily():
    """Tests that homophily is undefined without edges."""
    ds = Dataset(
        adjacency=SparseAdjacency.empty(2),
        features=np.ones((2, 1)),
        labels=LabeledNodes(np.array([0, 1]), 2),
        train_idx=np.array([0, 1]),
        val_idx=np.array([], dtype=np.int64),
        test_idx=np.array([], dtype=np.int64),
    )

    assert describe_dataset(ds)["edge_homophily"] is None


# --- Tests for convert_planetoid ---


def test_convert_planetoid_reproduces_public_split(tmp_path, caplog):
    """Tests the public split, test-row reordering and feature
    normalization of a Planetoid dump.
    """
    # Arrange
    test_index = [512, 510, 514, 511, 513]
    tx = _write_planetoid(tmp_path, "cora", test_index, extra_edges=(900,))

    # Act
    with caplog.at_level(logging.WARNING):
        ds = convert_planetoid(tmp_path, "cora")

    # Assert
    assert ds.num_nodes == 515
    np.testing.assert_array_equal(ds.train_idx, [0, 1])
    np.testing.assert_array_equal(ds.val_idx, np.arange(2, 502))
    np.testing.assert_array_equal(ds.test_idx, np.arange(510, 515))
    for position, node in enumerate(test_index):
        expected = tx[position] / tx[position].sum()
        np.testing.assert_allclose(ds.features[node], expected)
    np.testing.assert_allclose(ds.features.sum(axis=1), 1.0)
    assert ds.adjacency.num_edges == 509
    assert "Dropped 1 cora edges" in caplog.text


def test_convert_planetoid_pads_citeseer_gaps(tmp_path):
    """Tests that missing Citeseer test rows become zero features."""
    # Arrange
    _write_planetoid(tmp_path, "citeseer", [512, 510])

    # Act
    ds = convert_planetoid(tmp_path, "citeseer", normalize_features=False)

    # Assert
    assert ds.num_nodes == 513
    np.testing.assert_array_equal(ds.test_idx, [510, 512])
    np.testing.assert_array_equal(ds.features[511], np.zeros(4))


def test_convert_planetoid_reports_missing_files(tmp_path):
    """Tests that an incomplete Planetoid dump is refused."""
    with pytest.raises(DatasetFormatError, match="missing Planetoid file"):
        convert_planetoid(tmp_path, "cora")
