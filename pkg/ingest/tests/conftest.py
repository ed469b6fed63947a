import numpy as np
import pytest

from graphingest.convert import RawDataset, convert_raw


def make_tiny_raw() -> RawDataset:
    """Six nodes in two triangles joined by one edge, messy entry list.

    The entries deliberately contain one self-loop (2,2), one duplicate
    (1,2), and one reciprocal pair (0,1)/(1,0); normalization must fold all
    of that down to 7 undirected edges. Same-label edges: 6 of 7, so
    edge homophily is 6/7.
    """
    entries = np.array([
        (0, 1), (1, 0), (1, 2), (0, 2), (3, 4),
        (4, 5), (3, 5), (2, 3), (2, 2), (1, 2),
    ], dtype=np.int64)
    rng = np.random.default_rng(7)
    features = (rng.random((6, 4)) < 0.4).astype(np.float64)
    labels = np.array([0, 0, 0, 1, 1, 1], dtype=np.int64)
    return RawDataset("tiny", entries, features, labels,
                      train_ids=np.array([0, 3]),
                      test_ids=np.array([2, 5]),
                      source="fixture")


TINY_UNDIRECTED = [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)]
TINY_HOMOPHILY = 6.0 / 7.0


@pytest.fixture()
def tiny_raw():
    return make_tiny_raw()


@pytest.fixture()
def converted_dir(tmp_path, tiny_raw):
    out = tmp_path / "tiny"
    convert_raw(tiny_raw, out)
    return out
