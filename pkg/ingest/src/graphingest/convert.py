"""Normalize a raw dataset and write it in the interchange layout.

The interchange directory is what the convolution library consumes:

    manifest.json   name / num_nodes / num_features / num_classes
    edges.tsv       one undirected edge per line, "u<TAB>v", u < v, sorted
    features.csv    one row per node, headerless floats
    labels.tsv      "node<TAB>label" per node
    splits.json     optional {"train": [...], "test": [...]}

Raw edge lists arrive as directed entry arrays in whatever convention the
upstream uses (each undirected edge once, twice, or with duplicates and
self-loops).  Normalization removes self-loops, deduplicates, folds both
directions onto the canonical u < v pair, and sorts.  Output is
byte-deterministic for a given raw dataset.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .catalog import PublishedStats


class IngestError(Exception):
    """Raw data is malformed (bad shapes, out-of-range endpoints or labels)."""


class CountMismatch(IngestError):
    """Converted counts disagree with the published statistics."""


@dataclass
class RawDataset:
    """A dataset as handed over by an upstream loader, before normalization."""

    name: str
    edge_entries: np.ndarray          # (E, 2) directed entries, any convention
    features: np.ndarray              # (n, p)
    labels: np.ndarray                # (n,)
    train_ids: np.ndarray | None = None
    test_ids: np.ndarray | None = None
    source: str = "in-memory"


@dataclass(frozen=True)
class EdgeStats:
    raw_entries: int
    self_loops_removed: int
    duplicates_removed: int
    unique_directed: int              # distinct ordered non-loop pairs
    undirected: int                   # distinct unordered pairs


@dataclass
class ConversionReport:
    name: str
    out_dir: str
    num_nodes: int
    num_features: int
    num_classes: int
    edge_stats: EdgeStats
    wrote_split: bool
    expected: PublishedStats | None = None
    notes: list[str] = field(default_factory=list)

    def to_text(self) -> str:
        e = self.edge_stats
        lines = [
            f"converted {self.name} -> {self.out_dir}",
            f"  nodes: {self.num_nodes}   features: {self.num_features}"
            f"   classes: {self.num_classes}",
            f"  edges: {e.raw_entries} raw entries"
            f" ({e.self_loops_removed} self-loops and"
            f" {e.duplicates_removed} duplicates removed)"
            f" -> {e.unique_directed} directed, {e.undirected} undirected",
            f"  split: {'canonical, written' if self.wrote_split else 'none'}",
        ]
        if self.expected is not None:
            lines.append(
                f"  published directed-entry count {self.expected.directed_edges}"
                f" (got {e.unique_directed} directed / {2 * e.undirected}"
                " symmetrized entries)")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


def normalize_edge_entries(entries, num_nodes: int):
    """Clean a directed entry array down to canonical undirected pairs.

    Returns (pairs, stats) where pairs is an (M, 2) int64 array with
    u < v in each row, lexicographically sorted.
    """
    entries = np.asarray(entries, dtype=np.int64)
    if entries.ndim != 2 or entries.shape[1] != 2:
        raise IngestError(f"edge entries must be (E, 2), got {entries.shape}")
    if entries.shape[0] and (entries.min() < 0 or entries.max() >= num_nodes):
        raise IngestError("edge endpoint out of range")
    raw = int(entries.shape[0])
    off_diag = entries[entries[:, 0] != entries[:, 1]]
    loops = raw - int(off_diag.shape[0])
    unique_directed = np.unique(off_diag, axis=0) if off_diag.size else \
        off_diag.reshape(0, 2)
    dups = int(off_diag.shape[0]) - int(unique_directed.shape[0])
    if unique_directed.size:
        lo = np.minimum(unique_directed[:, 0], unique_directed[:, 1])
        hi = np.maximum(unique_directed[:, 0], unique_directed[:, 1])
        pairs = np.unique(np.stack([lo, hi], axis=1), axis=0)
    else:
        pairs = unique_directed
    stats = EdgeStats(raw, loops, dups, int(unique_directed.shape[0]),
                      int(pairs.shape[0]))
    return pairs, stats


def _check_ids(ids: np.ndarray, num_nodes: int, side: str) -> np.ndarray:
    ids = np.asarray(ids, dtype=np.int64)
    if ids.ndim != 1:
        raise IngestError(f"{side} ids must be one-dimensional")
    if ids.size and (ids.min() < 0 or ids.max() >= num_nodes):
        raise IngestError(f"{side} id out of range")
    if np.unique(ids).size != ids.size:
        raise IngestError(f"{side} ids contain duplicates")
    return np.sort(ids)


def convert_raw(raw: RawDataset, out_dir,
                expected: PublishedStats | None = None) -> ConversionReport:
    """Normalize ``raw`` and write the interchange directory.

    When ``expected`` is given, node/feature/class counts must match it
    exactly; a mismatch raises CountMismatch with a field-by-field diff.
    Edge counts are never fatal (upstream conventions vary) and are only
    reported.
    """
    features = np.asarray(raw.features, dtype=np.float64)
    labels = np.asarray(raw.labels, dtype=np.int64)
    if features.ndim != 2:
        raise IngestError(f"features must be 2-d, got shape {features.shape}")
    n, p = features.shape
    if labels.shape != (n,):
        raise IngestError(
            f"labels shape {labels.shape} does not match {n} nodes")
    if n == 0:
        raise IngestError("dataset has no nodes")
    if labels.min() < 0:
        raise IngestError("negative label")
    if not np.isfinite(features).all():
        raise IngestError("features contain non-finite entries")
    num_classes = int(labels.max()) + 1

    pairs, edge_stats = normalize_edge_entries(raw.edge_entries, n)

    if expected is not None:
        diffs = []
        for fname, actual, want in (("nodes", n, expected.nodes),
                                    ("features", p, expected.features),
                                    ("classes", num_classes, expected.classes)):
            if actual != want:
                diffs.append(f"  {fname}: expected {want}, got {actual}")
        if diffs:
            raise CountMismatch(
                f"{raw.name} does not match the published statistics:\n"
                + "\n".join(diffs))

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    manifest = {
        "name": raw.name,
        "num_nodes": n,
        "num_features": p,
        "num_classes": num_classes,
        "provenance": {
            "source": raw.source,
            "raw_entries": edge_stats.raw_entries,
            "self_loops_removed": edge_stats.self_loops_removed,
            "duplicates_removed": edge_stats.duplicates_removed,
            "unique_directed_entries": edge_stats.unique_directed,
            "undirected_edges": edge_stats.undirected,
        },
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n")

    lines = [f"{u}\t{v}" for u, v in pairs]
    (out / "edges.tsv").write_text("\n".join(lines) + ("\n" if lines else ""))

    with open(out / "features.csv", "w") as fh:
        for row in features:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")

    (out / "labels.tsv").write_text(
        "".join(f"{i}\t{int(lab)}\n" for i, lab in enumerate(labels)))

    wrote_split = False
    if raw.train_ids is not None and raw.test_ids is not None:
        train = _check_ids(raw.train_ids, n, "train")
        test = _check_ids(raw.test_ids, n, "test")
        (out / "splits.json").write_text(json.dumps(
            {"train": train.tolist(), "test": test.tolist()},
            sort_keys=True) + "\n")
        wrote_split = True

    report = ConversionReport(raw.name, str(out), n, p, num_classes,
                              edge_stats, wrote_split, expected)
    if expected is not None:
        for convention, count in (("upstream-directed", edge_stats.unique_directed),
                                  ("symmetrized", 2 * edge_stats.undirected)):
            delta = count - expected.directed_edges
            if delta:
                report.notes.append(
                    f"{convention} entry count differs from the published"
                    f" {expected.directed_edges} by {delta:+d}")
    return report
