import pytest

from cgc.datasets.io import write_dataset


@pytest.fixture
def sbm_dir(tmp_path, sbm):
    path = tmp_path / "sbm"
    write_dataset(sbm, path)
    return path
