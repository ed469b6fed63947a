"""Geometric analysis of the operator families.

This module quantifies how the ``(alpha, beta)`` parametrization organizes
embeddings by degree:

* a per-node upper bound on the norm of convolved features, driven by the
  augmented degree and local degree-difference statistics;
* expectation and high-probability bounds on the squared distance created by
  one convolution of entrywise Gaussian feature noise;
* the leading term of the embedding gap between two nodes with identical
  features but different degrees;
* a replica experiment measuring embedding distances between twin nodes of
  two isomorphic graph copies whose features differ by Gaussian noise.

The closed-form bounds assume unit edge weights (the degree-comparison steps
in their derivations use that A^2 entries equal A entries); functions that
need this check it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import generate_structural_replicas
from .errors import ValidationError
from .gcn import init_model
from .graphs import Graph
from .operators import (FAMILY_ROW_NORMALIZED, FAMILY_SYMMETRIC, ConvParams,
                        build_operator, build_symmetric)

M_VARIANTS = ("squared", "matched", "conservative")

#: numerical slack for bound-satisfaction flags
BOUND_TOL = 1e-9


@dataclass(frozen=True)
class TopologyStats:
    """Per-node degree statistics over the closed (self-inclusive) neighborhood.

    ``delta_bar[u]``     weighted mean degree difference,
                         sum_v w(u,v) * (d_v - d_u) / (d_u + beta)
    ``delta_sq_bar[u]``  same with squared differences.

    The self term carries weight ``beta`` and a zero difference, so it only
    enters through the normalizer.
    """

    degrees: np.ndarray
    aug_degrees: np.ndarray
    delta_bar: np.ndarray
    delta_sq_bar: np.ndarray
    beta: float


def neighborhood_degree_stats(graph: Graph, beta: float) -> TopologyStats:
    if beta < 0:
        raise ValidationError("beta must be non-negative")
    d = graph.degrees
    aug = d + beta
    rows = graph.expanded_rows()
    diff = d[graph.col_indices] - d[rows]
    w = graph.edge_weights
    n = graph.num_nodes
    sum_diff = np.bincount(rows, weights=w * diff, minlength=n)
    sum_sq = np.bincount(rows, weights=w * diff * diff, minlength=n)
    safe = np.where(aug > 0, aug, 1.0)
    delta_bar = np.where(aug > 0, sum_diff / safe, 0.0)
    delta_sq_bar = np.where(aug > 0, sum_sq / safe, 0.0)
    return TopologyStats(d.copy(), aug, delta_bar, delta_sq_bar, beta)


def _require_unweighted(graph: Graph, context: str) -> None:
    if graph.edge_weights.size and not np.all(graph.edge_weights == 1.0):
        raise ValidationError(f"{context} assumes unit edge weights")


def m_constant(d_max: float, alpha: float, beta: float,
               variant: str = "matched", order: int = 1) -> float:
    """Curvature constant for the second-order remainder of ``(1+x)^(-k*alpha)``.

    ``order`` is ``k``: 1 for the norm bound, 2 for the noise bound.  The
    remainder exponent is ``2 + order * alpha``.

    * ``squared``       ((d_max+beta)/(1+beta))^2 -- flat quadratic form, can
                        undershoot the true remainder for large alpha;
    * ``matched``       ((d_max+beta)/(1+beta))^(2+order*alpha) -- tightest
                        form valid on unit-weight graphs (default);
    * ``conservative``  (d_max+beta)^(2+order*alpha) -- drops the (1+beta)
                        discount, always dominates ``matched``.
    """
    if variant not in M_VARIANTS:
        raise ValidationError(f"m variant must be one of {M_VARIANTS}")
    if d_max + beta <= 0:
        raise ValidationError("d_max + beta must be positive")
    if variant == "squared":
        return float(((d_max + beta) / (1.0 + beta)) ** 2)
    exponent = 2.0 + order * alpha
    if variant == "matched":
        return float(((d_max + beta) / (1.0 + beta)) ** exponent)
    return float((d_max + beta) ** exponent)


def convolved_norm_bound(graph: Graph, alpha: float, beta: float,
                         z_norm_max: float, m_variant: str = "matched") -> np.ndarray:
    """Per-node bound on ``||(S z)_u||_2`` for the symmetric family.

    ``z_norm_max`` is the largest row 2-norm of the feature matrix.  The
    bound is ``z_norm_max`` times a degree profile: ``(d_u+beta)^(1-2*alpha)``
    corrected downward by the mean degree excess of the neighborhood and
    upward by a second-order term weighted with the ``m_constant``.
    """
    ConvParams(alpha, beta)  # range validation
    _require_unweighted(graph, "the convolved-norm bound")
    if z_norm_max < 0:
        raise ValidationError("z_norm_max must be non-negative")
    stats = neighborhood_degree_stats(graph, beta)
    aug = stats.aug_degrees
    if np.any(aug <= 0):
        raise ValidationError("every node needs degree + beta > 0 for the bound")
    m_val = m_constant(float(graph.degrees.max(initial=0.0)), alpha, beta,
                       m_variant, order=1)
    profile = (np.power(aug, 1.0 - 2.0 * alpha)
               - alpha * stats.delta_bar * np.power(aug, -2.0 * alpha)
               + 0.5 * alpha * (alpha + 1.0) * m_val * stats.delta_sq_bar
               * np.power(aug, -(1.0 + 2.0 * alpha)))
    return z_norm_max * profile


@dataclass(frozen=True)
class BoundReport:
    """Outcome of checking a per-node bound against measurements."""

    empirical: np.ndarray
    bound: np.ndarray
    alpha: float
    beta: float
    m_variant: str

    @property
    def slack(self) -> np.ndarray:
        return self.bound - self.empirical

    @property
    def satisfied(self) -> np.ndarray:
        return self.empirical <= self.bound + BOUND_TOL

    @property
    def num_violations(self) -> int:
        return int(np.sum(~self.satisfied))

    @property
    def all_satisfied(self) -> bool:
        return self.num_violations == 0


def check_norm_bound(graph: Graph, alpha: float, beta: float, z: np.ndarray,
                     m_variant: str = "matched") -> BoundReport:
    """Measure ``||(S z)_u||_2`` under the symmetric operator and compare it
    with :func:`convolved_norm_bound` at ``||z||_{2,inf}``."""
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    if z.shape[0] != graph.num_nodes:
        raise ValidationError("z must have one row per node")
    op = build_symmetric(graph, alpha, beta)
    empirical = np.linalg.norm(op.apply(z), axis=1)
    z_norm_max = float(np.linalg.norm(z, axis=1).max(initial=0.0))
    bound = convolved_norm_bound(graph, alpha, beta, z_norm_max, m_variant)
    return BoundReport(empirical, bound, alpha, beta, m_variant)


def _row_entry_profiles(graph: Graph, alpha: float, beta: float):
    """Row entries of the row-normalized operator, per node: the largest
    entry and the sum of squared entries (exact, from degrees alone)."""
    op = build_operator(graph, ConvParams(alpha, beta, FAMILY_ROW_NORMALIZED))
    mat = op.matrix
    n = graph.num_nodes
    max_entry = np.zeros(n)
    sq_sum = np.zeros(n)
    rows = np.repeat(np.arange(n), np.diff(mat.indptr))
    np.maximum.at(max_entry, rows, mat.data)
    np.add.at(sq_sum, rows, mat.data ** 2)
    return max_entry, sq_sum


def noise_distance_bounds(graph: Graph, alpha: float, beta: float, sigma: float,
                          w_fro: float, delta: float, family: str,
                          m_variant: str = "matched",
                          row_mu: str = "holder"):
    """Expected and high-probability bounds on ``||(S eps)_u W||_2^2`` for
    entrywise Gaussian noise ``eps`` with scale ``sigma``.

    Returns ``(mu, high)`` arrays over all nodes.  ``mu`` bounds the
    expectation; ``high`` adds a sub-exponential tail deviation
    ``2*sqrt(2) * sqrt(total_variance) * log(1/delta)`` and holds with
    probability at least ``1 - delta``.

    For the row-normalized family ``mu`` defaults to the largest row entry
    times ``sigma^2 * w_fro^2`` (``row_mu="holder"``); ``row_mu="display"``
    selects a looser closed form in augmented degrees only,
    ``sigma^2 w^2 / ((1+beta) * sum_v (d_v+beta)^(-2*alpha))``, which can
    undershoot the true expectation when ``beta > 1`` and is kept only for
    comparison.
    """
    ConvParams(alpha, beta, family)
    _require_unweighted(graph, "the noise-distance bound")
    if sigma < 0 or w_fro < 0:
        raise ValidationError("sigma and w_fro must be non-negative")
    if not 0 < delta < 1:
        raise ValidationError("delta must lie in (0, 1)")
    scale = sigma * sigma * w_fro * w_fro
    stats = neighborhood_degree_stats(graph, beta)
    aug = stats.aug_degrees
    if np.any(aug <= 0):
        raise ValidationError("every node needs degree + beta > 0 for the bound")

    if family == FAMILY_SYMMETRIC:
        m_val = m_constant(float(graph.degrees.max(initial=0.0)), alpha, beta,
                           m_variant, order=2)
        mu = scale * (np.power(aug, 2.0 - 4.0 * alpha)
                      + 2.0 * alpha * np.abs(stats.delta_bar) * np.power(aug, -4.0 * alpha)
                      + alpha * (2.0 * alpha + 1.0) * m_val * stats.delta_sq_bar
                      * np.power(aug, -(1.0 + 4.0 * alpha)))
        # exact variance sum: sigma^2 ||W||_F^2 * sum_v S_uv^2
        rows = graph.expanded_rows()
        neighbor_part = np.bincount(
            rows, weights=np.power(graph.degrees[graph.col_indices] + beta, -2.0 * alpha),
            minlength=graph.num_nodes)
        sq_sum = np.power(aug, -2.0 * alpha) * (
            neighbor_part + beta * beta * np.power(aug, -2.0 * alpha))
    else:
        max_entry, sq_sum = _row_entry_profiles(graph, alpha, beta)
        if row_mu == "holder":
            mu = scale * max_entry
        elif row_mu == "display":
            rows = graph.expanded_rows()
            closed = np.bincount(
                rows, weights=np.power(graph.degrees[graph.col_indices] + beta, -2.0 * alpha),
                minlength=graph.num_nodes)
            closed += np.power(aug, -2.0 * alpha)  # self term of the closed neighborhood
            mu = scale / ((1.0 + beta) * closed)
        else:
            raise ValidationError("row_mu must be 'holder' or 'display'")

    deviation = 2.0 * np.sqrt(2.0) * np.sqrt(scale * sq_sum) * np.log(1.0 / delta)
    return mu, mu + deviation


def noise_distance_bound(graph: Graph, u: int, alpha: float, beta: float,
                         sigma: float, w_fro: float, delta: float, family: str,
                         m_variant: str = "matched", row_mu: str = "holder"):
    """Single-node convenience wrapper around :func:`noise_distance_bounds`."""
    if not 0 <= u < graph.num_nodes:
        raise ValidationError(f"node {u} outside the graph")
    mu, high = noise_distance_bounds(graph, alpha, beta, sigma, w_fro, delta,
                                     family, m_variant, row_mu)
    return float(mu[u]), float(high[u])


def degree_gap_leading_term(deg_a: float, deg_b: float, alpha: float,
                            beta: float) -> float:
    """Leading term of the embedding gap between two identical-feature nodes
    of degree ``deg_a`` and ``deg_b``: ``(d_a+beta)^(1-2a) - (d_b+beta)^(1-2a)``.

    Vanishes identically at ``alpha = 0.5`` and is antisymmetric in the two
    degrees.
    """
    if deg_a < 0 or deg_b < 0 or beta < 0:
        raise ValidationError("degrees and beta must be non-negative")
    if alpha == 0.5:
        return 0.0
    exponent = 1.0 - 2.0 * alpha
    if exponent < 0 and (deg_a + beta == 0 or deg_b + beta == 0):
        raise ValidationError("degree + beta must be positive when alpha > 0.5")
    return float((deg_a + beta) ** exponent - (deg_b + beta) ** exponent)


@dataclass(frozen=True)
class DegreeClassRow:
    """Replica-distance aggregate for one template degree value."""

    degree: float
    count: int
    mean_distance: float
    q10: float
    q50: float
    q90: float


@dataclass(frozen=True)
class StructuralReplicaResult:
    """Per-node and per-degree-class outcomes of the replica experiment.

    ``conv_mean_sq`` holds, per node, the trial mean of
    ``||(S eps)_u W||_2^2 / ||W||_F^2`` -- the one-convolution quantity the
    noise bounds govern -- with the matching bound factors (``w_fro = 1``)
    in ``conv_mu_factor`` / ``conv_high_factor``.  ``emb_mean_distance`` is
    the full two-layer embedding distance between twins.
    """

    degrees: np.ndarray
    emb_mean_distance: np.ndarray
    conv_mean_sq: np.ndarray
    conv_mu_factor: np.ndarray
    conv_high_factor: np.ndarray
    class_rows: tuple[DegreeClassRow, ...]
    trials: int


def structural_replica_distances(template: Graph, alpha: float, beta: float,
                                 family: str, sigma: float, trials: int,
                                 seed: int, feature_dim: int = 8,
                                 hidden_dim: int = 16, delta: float = 0.01,
                                 m_variant: str = "matched") -> StructuralReplicaResult:
    """Run the twin-copy experiment ``trials`` times with fresh noise and a
    fresh untrained model per trial, and aggregate twin distances."""
    if trials < 1:
        raise ValidationError("trials must be positive")
    params = ConvParams(alpha, beta, family)
    n = template.num_nodes
    op_a = build_operator(template, params)
    emb_dist = np.zeros((trials, n))
    conv_sq = np.zeros((trials, n))
    for t in range(trials):
        _, copy_b, phi, x_a, x_b = generate_structural_replicas(
            template, seed + t, sigma, feature_dim)
        op_b = build_operator(copy_b, params)
        model = init_model(feature_dim, hidden_dim, 2, seed=(seed ^ 0x5F5E100) + t)
        emb_a = op_a.apply(np.maximum(op_a.apply(x_a @ model.W1) + model.b1, 0.0))
        emb_b = op_b.apply(np.maximum(op_b.apply(x_b @ model.W1) + model.b1, 0.0))
        emb_dist[t] = np.linalg.norm(emb_a - emb_b[phi], axis=1)
        lin_a = op_a.apply(x_a) @ model.W1
        lin_b = op_b.apply(x_b)[phi] @ model.W1
        w_fro_sq = float(np.sum(model.W1 ** 2))
        conv_sq[t] = np.sum((lin_a - lin_b) ** 2, axis=1) / w_fro_sq
    mu, high = noise_distance_bounds(template, alpha, beta, sigma, 1.0, delta,
                                     family, m_variant)
    degrees = template.degrees
    rows = []
    for value in np.unique(degrees):
        members = degrees == value
        samples = emb_dist[:, members].ravel()
        q10, q50, q90 = np.quantile(samples, [0.1, 0.5, 0.9])
        rows.append(DegreeClassRow(float(value), int(members.sum()),
                                   float(samples.mean()), float(q10),
                                   float(q50), float(q90)))
    return StructuralReplicaResult(
        degrees=degrees.copy(),
        emb_mean_distance=emb_dist.mean(axis=0),
        conv_mean_sq=conv_sq.mean(axis=0),
        conv_mu_factor=mu,
        conv_high_factor=high,
        class_rows=tuple(rows),
        trials=trials,
    )
