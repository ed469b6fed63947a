"""Independent re-check of a converted interchange directory.

Reads the files back with its own parser (deliberately not shared with the
writer), re-derives every count plus edge homophily and average degree, and
compares against the published statistics when the dataset is a known
benchmark.  Structural problems (bad ordering, duplicate edges, label gaps)
and statistic mismatches are collected, not raised, so one run reports
everything wrong at once.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .catalog import PublishedStats

HOMOPHILY_TOL = 0.02
AVG_DEGREE_RTOL = 0.05

_REQUIRED = ("manifest.json", "edges.tsv", "features.csv", "labels.tsv")


@dataclass
class VerificationReport:
    directory: str
    name: str = ""
    num_nodes: int = 0
    num_features: int = 0
    num_classes: int = 0
    undirected_edges: int = 0
    upstream_directed: int | None = None   # from manifest provenance, if any
    edge_homophily: float | None = None
    avg_degree: float | None = None
    expected: PublishedStats | None = None
    structural_errors: list[str] = field(default_factory=list)
    stat_errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.structural_errors and not self.stat_errors

    def to_text(self) -> str:
        lines = [f"verify {self.directory}"]
        if self.name:
            lines.append(f"  dataset: {self.name}")
        lines.append(
            f"  nodes: {self.num_nodes}   features: {self.num_features}"
            f"   classes: {self.num_classes}")
        directed = 2 * self.undirected_edges
        entry = (f"  edges: {self.undirected_edges} undirected"
                 f" = {directed} symmetrized entries")
        if self.upstream_directed is not None:
            entry += f" ({self.upstream_directed} directed upstream entries)"
        lines.append(entry)
        if self.avg_degree is not None:
            lines.append(f"  avg degree: {self.avg_degree:.3f}")
        if self.edge_homophily is not None:
            lines.append(f"  edge homophily: {self.edge_homophily:.4f}")
        if self.expected is not None:
            e = self.expected
            lines.append(
                f"  published: {e.nodes} nodes, {e.directed_edges} entries,"
                f" {e.features} features, {e.classes} classes,"
                f" avg degree {e.avg_degree:.2f}, homophily {e.edge_homophily:.2f}")
        for err in self.structural_errors:
            lines.append(f"  STRUCTURE: {err}")
        for err in self.stat_errors:
            lines.append(f"  MISMATCH: {err}")
        lines.append(f"  result: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines)


def _parse_edges(path: Path, num_nodes: int, errors: list[str]) -> np.ndarray:
    pairs = []
    prev = None
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) not in (2, 3):
            errors.append(f"edges.tsv line {lineno}: {len(parts)} columns")
            continue
        try:
            u, v = int(parts[0]), int(parts[1])
            if len(parts) == 3:
                float(parts[2])
        except ValueError:
            errors.append(f"edges.tsv line {lineno}: not numeric")
            continue
        if not (0 <= u < num_nodes and 0 <= v < num_nodes):
            errors.append(f"edges.tsv line {lineno}: endpoint out of range")
            continue
        if u >= v:
            errors.append(
                f"edges.tsv line {lineno}: {u}\\t{v} breaks the canonical"
                " u < v form")
            continue
        if prev is not None and (u, v) <= prev:
            errors.append(
                f"edges.tsv line {lineno}: duplicate or out-of-order edge")
        prev = (u, v)
        pairs.append((u, v))
    return np.asarray(pairs, dtype=np.int64).reshape(-1, 2)


def _parse_labels(path: Path, num_nodes: int, num_classes: int,
                  errors: list[str]) -> np.ndarray:
    labels = np.full(num_nodes, -1, dtype=np.int64)
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            errors.append(f"labels.tsv line {lineno}: {len(parts)} columns")
            continue
        try:
            node, label = int(parts[0]), int(parts[1])
        except ValueError:
            errors.append(f"labels.tsv line {lineno}: not numeric")
            continue
        if not 0 <= node < num_nodes:
            errors.append(f"labels.tsv line {lineno}: node out of range")
            continue
        if labels[node] != -1:
            errors.append(f"labels.tsv line {lineno}: node {node} labeled twice")
        if not 0 <= label < num_classes:
            errors.append(f"labels.tsv line {lineno}: label {label} out of range")
            continue
        labels[node] = label
    unlabeled = np.nonzero(labels == -1)[0]
    if unlabeled.size:
        errors.append(f"{unlabeled.size} nodes without a label"
                      f" (first: {int(unlabeled[0])})")
    return labels


def _count_feature_rows(path: Path, num_features: int,
                        errors: list[str]) -> int:
    rows = 0
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != num_features:
            errors.append(
                f"features.csv line {lineno}: {len(cells)} columns,"
                f" manifest says {num_features}")
        else:
            try:
                [float(c) for c in cells]
            except ValueError:
                errors.append(f"features.csv line {lineno}: not numeric")
        rows += 1
    return rows


def _check_splits(path: Path, num_nodes: int, errors: list[str]) -> None:
    try:
        blob = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        errors.append(f"splits.json: {exc}")
        return
    for side in ("train", "test"):
        if side not in blob:
            errors.append(f"splits.json missing key {side!r}")
            continue
        ids = np.asarray(blob[side], dtype=np.int64)
        if ids.size and (ids.min() < 0 or ids.max() >= num_nodes):
            errors.append(f"splits.json {side} id out of range")
        if np.unique(ids).size != ids.size:
            errors.append(f"splits.json {side} ids contain duplicates")
    if "train" in blob and "test" in blob:
        overlap = set(map(int, blob["train"])) & set(map(int, blob["test"]))
        if overlap:
            errors.append(f"splits.json train/test overlap on {len(overlap)} ids")


def verify_directory(directory,
                     expected: PublishedStats | None = None) -> VerificationReport:
    """Re-derive the statistics of an interchange directory and compare."""
    directory = Path(directory)
    report = VerificationReport(str(directory), expected=expected)
    errs = report.structural_errors

    missing = [name for name in _REQUIRED if not (directory / name).is_file()]
    if missing:
        errs.extend(f"missing file {name}" for name in missing)
        return report

    try:
        manifest = json.loads((directory / "manifest.json").read_text())
    except json.JSONDecodeError as exc:
        errs.append(f"manifest.json: {exc}")
        return report
    for key in ("name", "num_nodes", "num_features", "num_classes"):
        if key not in manifest:
            errs.append(f"manifest.json missing key {key!r}")
    if errs:
        return report

    report.name = str(manifest["name"])
    n = report.num_nodes = int(manifest["num_nodes"])
    p = report.num_features = int(manifest["num_features"])
    c = report.num_classes = int(manifest["num_classes"])
    if n <= 0 or p <= 0 or c <= 0:
        errs.append("manifest counts must be positive")
        return report
    provenance = manifest.get("provenance", {})
    if "unique_directed_entries" in provenance:
        report.upstream_directed = int(provenance["unique_directed_entries"])

    pairs = _parse_edges(directory / "edges.tsv", n, errs)
    labels = _parse_labels(directory / "labels.tsv", n, c, errs)
    rows = _count_feature_rows(directory / "features.csv", p, errs)
    if rows != n:
        errs.append(f"features.csv has {rows} rows, manifest says {n}")
    if (directory / "splits.json").is_file():
        _check_splits(directory / "splits.json", n, errs)
    if "undirected_edges" in provenance and \
            int(provenance["undirected_edges"]) != pairs.shape[0]:
        errs.append(
            f"edges.tsv has {pairs.shape[0]} edges but provenance recorded"
            f" {provenance['undirected_edges']}")

    report.undirected_edges = int(pairs.shape[0])
    directed_basis = report.upstream_directed
    if directed_basis is None:
        directed_basis = 2 * report.undirected_edges
    report.avg_degree = directed_basis / n
    if pairs.shape[0] and not (labels == -1).any():
        same = labels[pairs[:, 0]] == labels[pairs[:, 1]]
        report.edge_homophily = float(same.mean())

    if errs or expected is None:
        return report

    stat = report.stat_errors
    for fname, actual, want in (("nodes", n, expected.nodes),
                                ("features", p, expected.features),
                                ("classes", c, expected.classes)):
        if actual != want:
            stat.append(f"{fname}: expected {want}, got {actual}")
    if report.edge_homophily is not None:
        delta = report.edge_homophily - expected.edge_homophily
        if abs(delta) > HOMOPHILY_TOL:
            stat.append(
                f"edge homophily {report.edge_homophily:.4f} is"
                f" {delta:+.4f} from the published"
                f" {expected.edge_homophily:.2f} (tol {HOMOPHILY_TOL})")
    rel = abs(report.avg_degree - expected.avg_degree) / expected.avg_degree
    if rel > AVG_DEGREE_RTOL:
        stat.append(
            f"avg degree {report.avg_degree:.3f} is {rel:.1%} from the"
            f" published {expected.avg_degree:.2f} (tol {AVG_DEGREE_RTOL:.0%})")
    return report
