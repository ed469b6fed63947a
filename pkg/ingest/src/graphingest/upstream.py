"""Load the eight benchmarks from their standard graph-learning distribution.

Everything network-facing lives here.  torch_geometric is imported lazily so
the rest of the package (normalization, writing, verification) works without
it; when it is missing or the download fails, UpstreamUnavailable carries the
reason and callers can skip or report cleanly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .catalog import PublishedStats, lookup
from .convert import RawDataset


class UpstreamUnavailable(Exception):
    """The upstream distribution cannot be reached or imported."""


def _mask_ids(mask) -> np.ndarray:
    arr = np.asarray(mask.numpy() if hasattr(mask, "numpy") else mask)
    if arr.ndim != 1:
        # some distributions ship several split columns; there is no single
        # canonical choice, so callers treat that as "no split"
        raise UpstreamUnavailable("split mask is not one-dimensional")
    return np.nonzero(arr)[0].astype(np.int64)


def load_upstream(name: str, cache_dir) -> RawDataset:
    """Download (or reuse a cached copy of) the named dataset.

    Returns the raw arrays exactly as distributed: directed edge entries,
    dense features, integer labels, plus canonical train/test ids for the
    citation benchmarks that define them.
    """
    stats = lookup(name)
    if stats is None:
        raise UpstreamUnavailable(f"unknown dataset {name!r}")
    try:
        import torch_geometric.datasets as tgd
    except ImportError as exc:
        raise UpstreamUnavailable(
            "torch_geometric is not installed (pip install torch_geometric)"
        ) from exc

    root = str(Path(cache_dir) / stats.upstream)
    try:
        data = _load_data(tgd, stats, root)
    except UpstreamUnavailable:
        raise
    except Exception as exc:   # noqa: BLE001 - download/IO errors vary widely
        raise UpstreamUnavailable(f"loading {stats.display} failed: {exc}") from exc

    edge_entries = np.asarray(data.edge_index.numpy().T, dtype=np.int64)
    features = np.asarray(data.x.numpy(), dtype=np.float64)
    labels = np.asarray(data.y.numpy(), dtype=np.int64)
    train_ids = test_ids = None
    if stats.canonical_split:
        train_ids = _mask_ids(data.train_mask)
        test_ids = _mask_ids(data.test_mask)
    return RawDataset(stats.key, edge_entries, features, labels,
                      train_ids, test_ids, source=stats.upstream)


def _load_data(tgd, stats: PublishedStats, root: str):
    if stats.upstream == "planetoid":
        name = {"cora": "Cora", "citeseer": "CiteSeer",
                "pubmed": "PubMed"}[stats.key]
        return tgd.Planetoid(root, name)[0]
    if stats.upstream == "coauthor":
        return tgd.Coauthor(root, "CS")[0]
    if stats.upstream == "amazon":
        return tgd.Amazon(root, "Photo")[0]
    if stats.upstream == "actor":
        return tgd.Actor(root)[0]
    if stats.upstream == "webkb":
        return tgd.WebKB(root, stats.display)[0]
    raise UpstreamUnavailable(f"no loader for collection {stats.upstream!r}")
