"""Dataset bundles: interchange-format I/O, splits, and synthetic generators."""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from itertools import combinations
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import LoadError, ValidationError
from .graphs import Graph, build_graph, is_connected, relabel_graph

NOISE_MODES = ("uniform", "degree_increasing", "degree_flipped")


@dataclass(frozen=True)
class SplitSpec:
    """Disjoint train/test node-id sets."""

    train_ids: np.ndarray
    test_ids: np.ndarray

    def __post_init__(self):
        train = np.asarray(self.train_ids, dtype=np.int64)
        test = np.asarray(self.test_ids, dtype=np.int64)
        object.__setattr__(self, "train_ids", train)
        object.__setattr__(self, "test_ids", test)
        if train.size == 0 or test.size == 0:
            raise ValidationError("both split sides must be non-empty")
        if np.intersect1d(train, test).size:
            raise ValidationError("train and test ids overlap")


@dataclass(frozen=True)
class DatasetBundle:
    """A graph with node features, labels, and an optional split."""

    graph: Graph
    features: np.ndarray
    labels: np.ndarray
    num_classes: int
    split: SplitSpec | None = None
    name: str = ""

    def __post_init__(self):
        if self.features.shape[0] != self.graph.num_nodes:
            raise ValidationError("feature row count does not match the node count")
        if self.labels.shape[0] != self.graph.num_nodes:
            raise ValidationError("label count does not match the node count")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.num_classes):
            raise ValidationError("label outside [0, num_classes)")

    def with_split(self, split: SplitSpec) -> "DatasetBundle":
        return replace(self, split=split)


def random_split(num_nodes: int, train_count: int, seed: int) -> SplitSpec:
    """Uniform random split into ``train_count`` train nodes and the rest."""
    if not 0 < train_count < num_nodes:
        raise ValidationError(
            f"train_count must be in (0, {num_nodes}), got {train_count}")
    perm = np.random.default_rng(seed).permutation(num_nodes)
    return SplitSpec(np.sort(perm[:train_count]), np.sort(perm[train_count:]))


# ---------------------------------------------------------------------------
# Interchange format:
#   manifest.json  {"name", "num_nodes", "num_features", "num_classes"}
#   edges.tsv      one undirected edge per line, two 0-indexed columns
#   features.csv   dense reals, one row per node
#   labels.tsv     node_id <TAB> class_id
#   splits.json    optional {"train": [...], "test": [...]}
# ---------------------------------------------------------------------------

_MANIFEST_KEYS = ("name", "num_nodes", "num_features", "num_classes")


def load_dataset(directory) -> DatasetBundle:
    """Load a dataset directory in the interchange layout."""
    directory = Path(directory)
    if not directory.is_dir():
        raise LoadError(f"dataset directory not found: {directory}")
    paths = {name: directory / name for name in
             ("manifest.json", "edges.tsv", "features.csv", "labels.tsv")}
    for name, path in paths.items():
        if not path.is_file():
            raise LoadError(f"missing required file: {path}")

    manifest = json.loads(paths["manifest.json"].read_text())
    for key in _MANIFEST_KEYS:
        if key not in manifest:
            raise ValidationError(f"manifest.json is missing key {key!r}")
    n = int(manifest["num_nodes"])
    p = int(manifest["num_features"])
    c = int(manifest["num_classes"])
    if n <= 0 or p <= 0 or c <= 0:
        raise ValidationError("manifest counts must be positive")

    edges = []
    for lineno, line in enumerate(paths["edges.tsv"].read_text().splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) == 2:
            edges.append((int(parts[0]), int(parts[1])))
        elif len(parts) == 3:
            edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
        else:
            raise ValidationError(f"edges.tsv line {lineno} has {len(parts)} columns")
    graph = build_graph(n, edges)

    features = pd.read_csv(paths["features.csv"], header=None, dtype=np.float64).to_numpy()
    if features.shape != (n, p):
        raise ValidationError(
            f"features.csv has shape {features.shape}, manifest says {(n, p)}")
    if not np.isfinite(features).all():
        raise ValidationError("features.csv contains non-finite entries")

    labels = np.full(n, -1, dtype=np.int64)
    for lineno, line in enumerate(paths["labels.tsv"].read_text().splitlines(), 1):
        if not line.strip():
            continue
        node_str, label_str = line.split("\t")
        node, label = int(node_str), int(label_str)
        if not 0 <= node < n:
            raise ValidationError(f"labels.tsv line {lineno}: node {node} out of range")
        if labels[node] != -1:
            raise ValidationError(f"labels.tsv line {lineno}: node {node} labeled twice")
        if not 0 <= label < c:
            raise ValidationError(f"labels.tsv line {lineno}: label {label} out of range")
        labels[node] = label
    if (labels == -1).any():
        missing = int(np.nonzero(labels == -1)[0][0])
        raise ValidationError(f"node {missing} has no label")

    split = None
    split_path = directory / "splits.json"
    if split_path.is_file():
        blob = json.loads(split_path.read_text())
        ids = {}
        for side in ("train", "test"):
            if side not in blob:
                raise ValidationError(f"splits.json is missing key {side!r}")
            arr = np.asarray(blob[side], dtype=np.int64)
            if arr.size and (arr.min() < 0 or arr.max() >= n):
                raise ValidationError(f"splits.json {side} id out of range")
            if np.unique(arr).size != arr.size:
                raise ValidationError(f"splits.json {side} ids contain duplicates")
            ids[side] = arr
        split = SplitSpec(ids["train"], ids["test"])

    return DatasetBundle(graph, features, labels, c, split, str(manifest["name"]))


def save_dataset(bundle: DatasetBundle, directory) -> Path:
    """Write a bundle as an interchange directory (UTF-8, LF newlines)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = {
        "name": bundle.name,
        "num_nodes": bundle.graph.num_nodes,
        "num_features": int(bundle.features.shape[1]),
        "num_classes": bundle.num_classes,
    }
    (directory / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    u, v, w = bundle.graph.edge_list()
    if np.all(w == 1.0):
        lines = [f"{a}\t{b}" for a, b in zip(u, v)]
    else:
        lines = [f"{a}\t{b}\t{c!r}" for a, b, c in zip(u, v, w)]
    (directory / "edges.tsv").write_text("\n".join(lines) + ("\n" if lines else ""))
    with open(directory / "features.csv", "w") as fh:
        for row in bundle.features:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")
    (directory / "labels.tsv").write_text(
        "".join(f"{i}\t{int(lab)}\n" for i, lab in enumerate(bundle.labels)))
    if bundle.split is not None:
        (directory / "splits.json").write_text(json.dumps(
            {"train": bundle.split.train_ids.tolist(),
             "test": bundle.split.test_ids.tolist()}, sort_keys=True) + "\n")
    return directory


# ---------------------------------------------------------------------------
# Synthetic hub-periphery generator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SyntheticConfig:
    """Hub-periphery generator settings.

    Each hub is a clique of ``hub_size`` nodes; every clique node carries its
    own preferential-attachment tree of ``periphery_size`` nodes; one random
    link joins each hub to another hub.  Labels are hub ids, features are a
    one-hot hub indicator concatenated with ``dummy_dim`` standard Gaussian
    columns, and entrywise Gaussian noise is added with a per-node scale set
    by ``noise_mode``.
    """

    num_hubs: int = 4
    hub_size: int = 20
    periphery_size: int = 10
    ba_m: int = 1
    dummy_dim: int = 16
    noise_mode: str = "uniform"
    noise_variance: float = 4.0
    seed: int = 0

    def __post_init__(self):
        if self.num_hubs < 2:
            raise ValidationError("need at least two hubs for inter-hub links")
        if self.hub_size < 2:
            raise ValidationError("hub_size must be at least 2")
        if self.periphery_size < 1 or self.ba_m < 1:
            raise ValidationError("periphery_size and ba_m must be positive")
        if self.ba_m > self.periphery_size:
            raise ValidationError("ba_m cannot exceed the periphery size")
        if self.noise_mode not in NOISE_MODES:
            raise ValidationError(f"noise_mode must be one of {NOISE_MODES}")
        if self.noise_variance <= 0:
            raise ValidationError("noise_variance must be positive")

    @property
    def num_nodes(self) -> int:
        return self.num_hubs * self.hub_size * (1 + self.periphery_size)


def _preferential_tree_edges(rng: np.random.Generator, block: np.ndarray,
                             m: int) -> list[tuple[int, int]]:
    """Preferential-attachment edges among ``block`` node ids.

    Node ``block[i]`` attaches to ``min(m, i)`` distinct earlier nodes chosen
    proportionally to their current degree (uniform pick from a repeated-node
    list).  With m=1 this is a random recursive tree biased to high degrees.
    """
    edges = []
    repeated: list[int] = []
    for i in range(1, block.size):
        k = min(m, i)
        chosen: set[int] = set()
        while len(chosen) < k:
            if not repeated:
                target = int(block[0])
            else:
                target = repeated[int(rng.integers(len(repeated)))]
            chosen.add(target)
        for target in chosen:
            edges.append((target, int(block[i])))
            repeated.append(target)
            repeated.append(int(block[i]))
    return edges


def _noise_scales(cfg: SyntheticConfig, degrees: np.ndarray) -> np.ndarray:
    """Per-node noise standard deviations for the configured mode."""
    if cfg.noise_mode == "uniform":
        return np.full(degrees.shape, np.sqrt(cfg.noise_variance))
    if cfg.noise_mode == "degree_increasing":
        variances = np.exp(3.0 * (-1.5 + np.log(degrees)))
    else:  # degree_flipped: variance of the degree-mirrored node
        n = degrees.size
        order = np.lexsort((np.arange(n), degrees))  # ascending, ties by id
        ranks = np.empty(n, dtype=np.int64)
        ranks[order] = np.arange(1, n + 1)
        sorted_degrees = degrees[order]
        variances = np.exp(3.0 * (-1.5 + np.log(sorted_degrees[n - ranks])))
    return np.sqrt(variances)


def generate_hub_periphery(cfg: SyntheticConfig) -> DatasetBundle:
    """Generate the hub-periphery benchmark bundle for ``cfg``."""
    n = cfg.num_nodes
    block = cfg.hub_size * (1 + cfg.periphery_size)
    ss = np.random.SeedSequence([int(cfg.seed), 101])
    rng_structure, rng_features, rng_noise = (
        np.random.default_rng(child) for child in ss.spawn(3))

    labels = np.zeros(n, dtype=np.int64)
    edges: list[tuple[int, int]] = []
    hub_members: list[np.ndarray] = []
    for h in range(cfg.num_hubs):
        base = h * block
        clique = np.arange(base, base + cfg.hub_size)
        hub_members.append(clique)
        labels[base:base + block] = h
        edges.extend(combinations(clique.tolist(), 2))
        for i, anchor in enumerate(clique):
            start = base + cfg.hub_size + i * cfg.periphery_size
            periphery = np.arange(start, start + cfg.periphery_size)
            edges.append((int(anchor), int(periphery[0])))
            edges.extend(_preferential_tree_edges(rng_structure, periphery, cfg.ba_m))

    # One inter-hub link per hub; retry the whole link set with a fresh seed
    # offset until the graph is connected (at most 10 attempts).
    graph = None
    for attempt in range(10):
        rng_links = np.random.default_rng(
            np.random.SeedSequence([int(cfg.seed), 202, attempt]))
        link_edges = []
        for h in range(cfg.num_hubs):
            other = int(rng_links.integers(cfg.num_hubs - 1))
            if other >= h:
                other += 1
            a = int(rng_links.choice(hub_members[h]))
            b = int(rng_links.choice(hub_members[other]))
            key = (min(a, b), max(a, b))
            if key in link_edges or key in edges:
                continue
            link_edges.append(key)
        candidate = build_graph(n, edges + link_edges)
        if is_connected(candidate):
            graph = candidate
            break
    if graph is None:
        raise ValidationError("failed to obtain a connected graph in 10 attempts")

    one_hot = np.zeros((n, cfg.num_hubs))
    one_hot[np.arange(n), labels] = 1.0
    dummies = rng_features.standard_normal((n, cfg.dummy_dim))
    base_features = np.concatenate([one_hot, dummies], axis=1)
    scales = _noise_scales(cfg, graph.degrees)
    noise = rng_noise.standard_normal(base_features.shape) * scales[:, None]
    return DatasetBundle(graph, base_features + noise, labels, cfg.num_hubs,
                         None, f"hub_periphery_{cfg.noise_mode}")


def generate_structural_replicas(template: Graph, seed: int, sigma: float,
                                 feature_dim: int):
    """Two isomorphic copies of ``template`` with noise-perturbed features.

    Returns ``(copy_a, copy_b, phi, features_a, features_b)`` where ``phi``
    maps copy-a node ``u`` to its twin ``phi[u]`` in copy b, features_a are
    standard Gaussians, and ``features_b[phi[u]] = features_a[u] + sigma *
    Gaussian noise``.  With ``sigma = 0`` the twins' features are identical.
    """
    if sigma < 0:
        raise ValidationError("sigma must be non-negative")
    if feature_dim < 1:
        raise ValidationError("feature_dim must be positive")
    n = template.num_nodes
    ss = np.random.SeedSequence([int(seed), 303])
    rng_perm, rng_feat, rng_noise = (np.random.default_rng(c) for c in ss.spawn(3))
    phi = rng_perm.permutation(n)
    copy_b = relabel_graph(template, phi)
    features_a = rng_feat.standard_normal((n, feature_dim))
    noise = rng_noise.standard_normal((n, feature_dim))
    features_b = np.empty_like(features_a)
    features_b[phi] = features_a + sigma * noise
    return template, copy_b, phi, features_a, features_b
