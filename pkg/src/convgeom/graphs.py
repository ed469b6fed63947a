"""Immutable undirected graphs in CSR form plus basic structural utilities."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

UNREACHABLE = -1  # hop-matrix sentinel for pairs in different components


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph stored in compressed sparse row form.

    Both directions of every edge are stored explicitly, rows are sorted by
    column, and there are no self-loops or duplicate entries.  ``degrees[u]``
    is the weighted degree of ``u`` (the sum of incident edge weights).
    """

    num_nodes: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    edge_weights: np.ndarray
    degrees: np.ndarray

    @property
    def num_edges(self) -> int:
        """Number of undirected edges."""
        return self.col_indices.shape[0] // 2

    def neighbors(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        """Column indices and weights of row ``u`` (sorted by column)."""
        lo, hi = self.row_offsets[u], self.row_offsets[u + 1]
        return self.col_indices[lo:hi], self.edge_weights[lo:hi]

    def neighbor_counts(self) -> np.ndarray:
        """Unweighted degree of every node (number of distinct neighbors)."""
        return np.diff(self.row_offsets)

    def edge_list(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Canonical undirected edge list ``(u, v, w)`` with ``u < v``."""
        rows = np.repeat(np.arange(self.num_nodes), np.diff(self.row_offsets))
        keep = rows < self.col_indices
        return rows[keep], self.col_indices[keep], self.edge_weights[keep]

    def expanded_rows(self) -> np.ndarray:
        """Row index of every stored CSR entry."""
        return np.repeat(np.arange(self.num_nodes), np.diff(self.row_offsets))

    def dense_adjacency(self) -> np.ndarray:
        """Dense n-by-n adjacency matrix (for small-graph checks)."""
        dense = np.zeros((self.num_nodes, self.num_nodes))
        dense[self.expanded_rows(), self.col_indices] = self.edge_weights
        return dense


def _assemble_csr(num_nodes: int, rows: np.ndarray, cols: np.ndarray,
                  weights: np.ndarray) -> Graph:
    """Build a Graph from directed entry triples that already contain both
    orientations of every edge.  Exact duplicates collapse; duplicates whose
    weights disagree are rejected."""
    order = np.lexsort((cols, rows))
    rows, cols, weights = rows[order], cols[order], weights[order]
    if rows.size:
        same = (rows[1:] == rows[:-1]) & (cols[1:] == cols[:-1])
        if same.any():
            if np.any(same & (weights[1:] != weights[:-1])):
                idx = int(np.nonzero(same & (weights[1:] != weights[:-1]))[0][0])
                raise ValidationError(
                    f"conflicting weights for duplicate edge ({rows[idx + 1]}, {cols[idx + 1]})")
            keep = np.concatenate(([True], ~same))
            rows, cols, weights = rows[keep], cols[keep], weights[keep]
    offsets = np.zeros(num_nodes + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=num_nodes), out=offsets[1:])
    degrees = np.bincount(rows, weights=weights, minlength=num_nodes)
    return Graph(num_nodes, offsets, cols.astype(np.int64),
                 weights.astype(np.float64), degrees.astype(np.float64))


def build_graph(num_nodes: int, edges) -> Graph:
    """Build an undirected graph from an edge list.

    ``edges`` holds ``(u, v)`` or ``(u, v, weight)`` tuples with 0-indexed
    endpoints.  The list is symmetrized and deduplicated; self-loops, out of
    range endpoints, and non-positive weights are rejected.
    """
    if num_nodes < 0:
        raise ValidationError(f"num_nodes must be non-negative, got {num_nodes}")
    us, vs, ws = [], [], []
    for edge in edges:
        if len(edge) == 2:
            u, v = edge
            w = 1.0
        elif len(edge) == 3:
            u, v, w = edge
        else:
            raise ValidationError(f"edge {edge!r} is not a 2- or 3-tuple")
        u, v, w = int(u), int(v), float(w)
        if not (0 <= u < num_nodes and 0 <= v < num_nodes):
            raise ValidationError(f"edge ({u}, {v}) has an endpoint outside [0, {num_nodes})")
        if u == v:
            raise ValidationError(f"self-loop at node {u} is not allowed")
        if not np.isfinite(w) or w <= 0:
            raise ValidationError(f"edge ({u}, {v}) has invalid weight {w}")
        us.append(u)
        vs.append(v)
        ws.append(w)
    rows = np.asarray(us + vs, dtype=np.int64)
    cols = np.asarray(vs + us, dtype=np.int64)
    weights = np.asarray(ws + ws, dtype=np.float64)
    return _assemble_csr(num_nodes, rows, cols, weights)


def relabel_graph(graph: Graph, perm: np.ndarray) -> Graph:
    """Apply a node permutation: node ``u`` becomes ``perm[u]``."""
    perm = np.asarray(perm, dtype=np.int64)
    if sorted(perm.tolist()) != list(range(graph.num_nodes)):
        raise ValidationError("perm is not a permutation of the node ids")
    rows = perm[graph.expanded_rows()]
    cols = perm[graph.col_indices]
    return _assemble_csr(graph.num_nodes, rows, cols, graph.edge_weights.copy())


def _gather_neighbors(offsets: np.ndarray, cols: np.ndarray,
                      nodes: np.ndarray) -> np.ndarray:
    """Concatenated neighbor lists of ``nodes`` without a Python-level loop."""
    starts = offsets[nodes]
    counts = offsets[nodes + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=cols.dtype)
    shift = np.repeat(np.cumsum(counts) - counts, counts)
    flat = np.arange(total, dtype=np.int64) - shift + np.repeat(starts, counts)
    return cols[flat]


def shortest_path_hops(graph: Graph, sources: np.ndarray | None = None) -> np.ndarray:
    """Breadth-first hop counts from each source to every node.

    Returns an int32 matrix of shape ``(len(sources), num_nodes)`` (all nodes
    as sources when omitted).  Unreachable pairs hold ``UNREACHABLE``.
    Edge weights are ignored; a hop is a hop.
    """
    n = graph.num_nodes
    if sources is None:
        sources = np.arange(n)
    else:
        sources = np.asarray(sources, dtype=np.int64)
        if sources.size and (sources.min() < 0 or sources.max() >= n):
            raise ValidationError("source id outside the node range")
    hops = np.full((sources.size, n), UNREACHABLE, dtype=np.int32)
    for i, s in enumerate(sources):
        dist = hops[i]
        dist[s] = 0
        frontier = np.asarray([s], dtype=np.int64)
        level = 0
        while frontier.size:
            level += 1
            neigh = _gather_neighbors(graph.row_offsets, graph.col_indices, frontier)
            neigh = neigh[dist[neigh] == UNREACHABLE]
            if neigh.size == 0:
                break
            frontier = np.unique(neigh)
            dist[frontier] = level
    return hops


def is_connected(graph: Graph) -> bool:
    if graph.num_nodes == 0:
        return True
    reached = shortest_path_hops(graph, sources=np.asarray([0]))[0]
    return bool(np.all(reached != UNREACHABLE))


def edge_homophily(graph: Graph, labels: np.ndarray) -> float:
    """Fraction of undirected edges whose endpoints share a label."""
    labels = np.asarray(labels)
    if labels.shape[0] != graph.num_nodes:
        raise ValidationError("labels length does not match the node count")
    u, v, _ = graph.edge_list()
    if u.size == 0:
        raise ValidationError("homophily is undefined on an edgeless graph")
    return float(np.mean(labels[u] == labels[v]))


def generate_random_graph(num_nodes: int, edge_prob: float, seed: int,
                          min_degree: int = 0) -> Graph:
    """Erdos-Renyi style random graph with an optional minimum-degree repair.

    Nodes below ``min_degree`` after sampling get extra edges to uniformly
    chosen partners, so isolated nodes can be ruled out for operator tests.
    """
    if num_nodes < 2 and min_degree > 0:
        raise ValidationError("cannot enforce a minimum degree on fewer than 2 nodes")
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((num_nodes, num_nodes)) < edge_prob, k=1)
    u, v = np.nonzero(upper)
    edges = {(int(a), int(b)) for a, b in zip(u, v)}
    if min_degree > 0:
        counts = np.zeros(num_nodes, dtype=np.int64)
        for a, b in edges:
            counts[a] += 1
            counts[b] += 1
        for node in range(num_nodes):
            while counts[node] < min_degree:
                partner = int(rng.integers(num_nodes - 1))
                if partner >= node:
                    partner += 1
                key = (min(node, partner), max(node, partner))
                if key in edges:
                    continue
                edges.add(key)
                counts[node] += 1
                counts[partner] += 1
    return build_graph(num_nodes, sorted(edges))


def generate_random_connected_graph(num_nodes: int, extra_edges: int, seed: int) -> Graph:
    """Uniform random tree plus ``extra_edges`` additional distinct edges."""
    if num_nodes < 1:
        raise ValidationError("need at least one node")
    rng = np.random.default_rng(seed)
    edges = set()
    for child in range(1, num_nodes):
        parent = int(rng.integers(child))
        edges.add((parent, child))
    attempts = 0
    while len(edges) < num_nodes - 1 + extra_edges and attempts < 50 * (extra_edges + 1):
        attempts += 1
        a, b = rng.integers(num_nodes, size=2)
        if a == b:
            continue
        key = (int(min(a, b)), int(max(a, b)))
        if key not in edges:
            edges.add(key)
    return build_graph(num_nodes, sorted(edges))
