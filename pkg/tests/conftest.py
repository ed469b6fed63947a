"""Shared fixtures and oracle helpers for the test suite."""
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from convgeom.graphs import Graph, build_graph, generate_random_graph

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    max_examples=50,
)
settings.load_profile("suite")


def random_edge_list(num_nodes: int, rng: np.random.Generator,
                     edge_prob: float = 0.3) -> list[tuple[int, int]]:
    edges = []
    for u in range(num_nodes):
        for v in range(u + 1, num_nodes):
            if rng.random() < edge_prob:
                edges.append((u, v))
    return edges


def dense_symmetric_oracle(graph: Graph, alpha: float, beta: float) -> np.ndarray:
    """Dense reference for the symmetric operator, built entry by entry."""
    n = graph.num_nodes
    a = graph.dense_adjacency()
    d = graph.degrees
    s = np.zeros((n, n))
    for u in range(n):
        for v in range(n):
            if u == v:
                s[u, u] = beta * (d[u] + beta) ** (-2.0 * alpha) if beta > 0 else 0.0
            elif a[u, v] != 0:
                s[u, v] = a[u, v] * (d[u] + beta) ** (-alpha) * (d[v] + beta) ** (-alpha)
    return s


def dense_row_normalized_oracle(graph: Graph, alpha: float, beta: float) -> np.ndarray:
    s = dense_symmetric_oracle(graph, alpha, beta)
    sums = s.sum(axis=1, keepdims=True)
    return s / sums


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_graph():
    # 4-cycle with one chord
    return build_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])


@pytest.fixture
def star_graph():
    return build_graph(4, [(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def random_graphs():
    out = []
    for seed in range(12):
        g = generate_random_graph(5 + seed, 0.35, seed=seed, min_degree=1)
        out.append(g)
    return out
