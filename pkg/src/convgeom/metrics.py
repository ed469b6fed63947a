"""Cross-space comparison metrics for embeddings, features, and graphs.

Distance matrices here are plain square numpy arrays: symmetric, zero
diagonal, non-negative.  The battery covers PCA projection (power iteration),
a hop-based diffusion kernel, exact pairwise Euclidean distances, Spearman
rank correlation, entropic Gromov-Wasserstein discrepancy with a
conditional-gradient outer loop, an augmented edge-curvature score, and
nearest-pair graph reconstruction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .errors import ValidationError
from .graphs import UNREACHABLE, Graph, build_graph, shortest_path_hops


# ---------------------------------------------------------------------------
# PCA via power iteration
# ---------------------------------------------------------------------------

def top_principal_axes(x: np.ndarray, k: int, seed: int = 0,
                       max_iter: int = 1000, rtol: float = 1e-10):
    """Leading ``k`` eigenvectors and eigenvalues of the covariance of ``x``.

    Power iteration with deflation; iteration stops when the relative change
    of the eigenvalue estimate drops below ``rtol``.  Each axis is oriented
    so its largest-magnitude loading is positive.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValidationError("x must be 2-D")
    n, p = x.shape
    if not 1 <= k <= min(n, p):
        raise ValidationError(f"k must lie in [1, {min(n, p)}], got {k}")
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / max(n - 1, 1)
    rng = np.random.default_rng(seed)
    axes = np.empty((p, k))
    eigenvalues = np.empty(k)
    for j in range(k):
        v = rng.standard_normal(p)
        v /= np.linalg.norm(v)
        eig = 0.0
        for _ in range(max_iter):
            w = cov @ v
            norm = np.linalg.norm(w)
            if norm == 0.0:  # null space: any unit vector is an eigenvector
                eig = 0.0
                break
            v = w / norm
            if abs(norm - eig) <= rtol * max(norm, 1e-300):
                eig = norm
                break
            eig = norm
        flip = np.argmax(np.abs(v))
        if v[flip] < 0:
            v = -v
        axes[:, j] = v
        eigenvalues[j] = eig
        cov = cov - eig * np.outer(v, v)
    return axes, eigenvalues


def pca_project(x: np.ndarray, k: int, seed: int = 0) -> np.ndarray:
    """Project centered ``x`` onto its top ``k`` principal axes."""
    axes, _ = top_principal_axes(x, k, seed)
    centered = x - x.mean(axis=0)
    return centered @ axes


# ---------------------------------------------------------------------------
# Distances
# ---------------------------------------------------------------------------

def diffusion_kernel(graph: Graph, eps: float = 0.5,
                     sources: np.ndarray | None = None):
    """Gaussian kernel on BFS hop counts: ``K = exp(-hops^2 / eps)``.

    Unreachable pairs get kernel value 0.  Returns ``(kernel, hops)``.
    """
    if eps <= 0:
        raise ValidationError("eps must be positive")
    hops = shortest_path_hops(graph, sources)
    kernel = np.where(hops == UNREACHABLE, 0.0,
                      np.exp(-hops.astype(np.float64) ** 2 / eps))
    return kernel, hops


def graph_distance_matrix(graph: Graph, eps: float = 0.5,
                          sources: np.ndarray | None = None,
                          sqrt_form: bool = False) -> np.ndarray:
    """Distance induced by the diffusion kernel.

    Default is ``1 - K``; ``sqrt_form`` selects ``sqrt(2 - 2K)`` instead.
    When ``sources`` is given the columns are restricted to the same ids, so
    the result stays square and symmetric.
    """
    kernel, _ = diffusion_kernel(graph, eps, sources)
    if sources is not None:
        kernel = kernel[:, np.asarray(sources, dtype=np.int64)]
    dist = np.sqrt(np.maximum(2.0 - 2.0 * kernel, 0.0)) if sqrt_form else 1.0 - kernel
    np.fill_diagonal(dist, 0.0)
    return dist


def pairwise_euclidean(x: np.ndarray, block_elems: int = 1 << 24) -> np.ndarray:
    """Exact symmetric matrix of Euclidean distances between rows of ``x``.

    Distances come from explicit row differences, block by block, which keeps
    full float64 accuracy (no Gram-matrix cancellation) at bounded memory
    (roughly ``block_elems`` float64 temporaries per block).
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    n, p = x.shape
    out = np.empty((n, n))
    step = max(1, block_elems // max(n * p, 1))
    for lo in range(0, n, step):
        hi = min(lo + step, n)
        diff = x[lo:hi, None, :] - x[None, :, :]
        out[lo:hi] = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    out = 0.5 * (out + out.T)
    np.fill_diagonal(out, 0.0)
    return out


def _check_distance_matrix(d: np.ndarray, name: str) -> np.ndarray:
    d = np.asarray(d, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValidationError(f"{name} must be square")
    if not np.allclose(d, d.T, atol=1e-12):
        raise ValidationError(f"{name} must be symmetric")
    if np.any(d < 0) or np.any(np.abs(np.diag(d)) > 1e-12):
        raise ValidationError(f"{name} must be non-negative with a zero diagonal")
    return d


# ---------------------------------------------------------------------------
# Spearman rank correlation
# ---------------------------------------------------------------------------

def average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the mean of their rank range."""
    values = np.asarray(values).ravel()
    uniq, inverse, counts = np.unique(values, return_inverse=True,
                                      return_counts=True)
    starts = np.cumsum(counts) - counts  # 0-based start of each tie group
    mean_rank = starts + (counts + 1) / 2.0
    return mean_rank[inverse]


def spearman(x: np.ndarray, y: np.ndarray) -> float:
    """Spearman correlation: Pearson correlation of average ranks."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValidationError("inputs must have equal length")
    if x.size < 2:
        raise ValidationError("need at least two observations")
    rx = average_ranks(x)
    ry = average_ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    sx = np.sqrt(np.sum(rx * rx))
    sy = np.sqrt(np.sum(ry * ry))
    if sx == 0.0 or sy == 0.0:
        raise ValidationError("rank correlation is undefined for constant input")
    return float(np.dot(rx, ry) / (sx * sy))


# ---------------------------------------------------------------------------
# Gromov-Wasserstein discrepancy (square loss, uniform marginals)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GWConfig:
    """Solver settings.

    ``epsilon_reg = None`` scales the entropic regularizer to
    ``5e-3 * median(D1) * median(D2)`` over off-diagonal entries.
    ``subsample`` caps the number of points per space (seeded, uniform).
    ``snap_permutation`` post-checks the best hard matching of the final
    coupling (square spaces only) and keeps it when it lowers the objective.
    """

    epsilon_reg: float | None = None
    max_outer: int = 50
    max_sinkhorn: int = 200
    tol: float = 1e-9
    subsample: int | None = 300
    seed: int = 0
    snap_permutation: bool = True


@dataclass(frozen=True)
class GWResult:
    value: float
    coupling: np.ndarray
    converged: bool
    outer_iterations: int


def _offdiag_median(d: np.ndarray) -> float:
    n = d.shape[0]
    if n < 2:
        return 1.0
    iu = np.triu_indices(n, k=1)
    med = float(np.median(d[iu]))
    return med if med > 0 else 1.0


def _round_to_marginals(plan: np.ndarray, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Project an almost-feasible transport plan onto exact marginals.

    Scale rows down to at most ``p``, then columns down to at most ``q``,
    then spread the missing mass as a rank-one correction.  The output has
    exactly the requested marginals up to float roundoff.
    """
    row = plan.sum(axis=1)
    plan = plan * np.where(row > 0, np.minimum(1.0, p / np.where(row > 0, row, 1.0)), 0.0)[:, None]
    col = plan.sum(axis=0)
    plan = plan * np.where(col > 0, np.minimum(1.0, q / np.where(col > 0, col, 1.0)), 0.0)[None, :]
    err_r = p - plan.sum(axis=1)
    err_c = q - plan.sum(axis=0)
    total = err_r.sum()
    if total > 0:
        plan = plan + np.outer(err_r, err_c) / total
    return plan


def _sinkhorn_log(cost: np.ndarray, p: np.ndarray, q: np.ndarray, eps: float,
                  max_iter: int, tol: float) -> np.ndarray:
    """Entropic OT in the log domain; returns a plan rounded to exact marginals."""
    log_p = np.log(p)
    log_q = np.log(q)
    scaled = -cost / eps
    g = np.zeros_like(q)
    f = np.zeros_like(p)
    for _ in range(max_iter):
        m = scaled + g[None, :]
        f = log_p - _logsumexp_rows(m)
        m = scaled + f[:, None]
        g = log_q - _logsumexp_rows(m.T)
        plan = np.exp(scaled + f[:, None] + g[None, :])
        if np.abs(plan.sum(axis=1) - p).max() < tol:
            break
    return _round_to_marginals(plan, p, q)


def _logsumexp_rows(m: np.ndarray) -> np.ndarray:
    peak = m.max(axis=1, keepdims=True)
    return (peak + np.log(np.exp(m - peak).sum(axis=1, keepdims=True))).ravel()


def _gw_terms(d1, d2, p, q):
    """Square-loss decomposition: the constant part of the objective tensor."""
    f1 = (d1 ** 2) @ p
    f2 = (d2 ** 2) @ q
    return f1[:, None] + f2[None, :]


def _line_search_quad(a: float, b: float) -> float:
    """Minimize ``a t^2 + b t`` over ``t`` in [0, 1]."""
    if a > 0:
        return float(np.clip(-b / (2.0 * a), 0.0, 1.0))
    return 1.0 if a + b < 0 else 0.0


def gromov_wasserstein(d1: np.ndarray, d2: np.ndarray,
                       cfg: GWConfig = GWConfig()) -> GWResult:
    """Entropic-inner conditional-gradient solver for the square-loss
    Gromov-Wasserstein discrepancy with uniform marginals.

    The objective is ``sum_{i,j,k,l} (d1[i,k] - d2[j,l])^2 T[i,j] T[k,l]``.
    Each outer iteration solves the linearized problem with log-domain
    entropic scaling, rounds the plan to exact marginals, and takes the
    exact quadratic line-search step, so the objective never increases.
    """
    d1 = _check_distance_matrix(d1, "d1")
    d2 = _check_distance_matrix(d2, "d2")
    rng = np.random.default_rng(cfg.seed)
    if cfg.subsample is not None:
        if d1.shape[0] > cfg.subsample:
            idx = np.sort(rng.choice(d1.shape[0], cfg.subsample, replace=False))
            d1 = d1[np.ix_(idx, idx)]
        if d2.shape[0] > cfg.subsample:
            idx = np.sort(rng.choice(d2.shape[0], cfg.subsample, replace=False))
            d2 = d2[np.ix_(idx, idx)]
    n, m = d1.shape[0], d2.shape[0]
    p = np.full(n, 1.0 / n)
    q = np.full(m, 1.0 / m)
    eps = cfg.epsilon_reg
    if eps is None:
        eps = 5e-3 * _offdiag_median(d1) * _offdiag_median(d2)

    const = _gw_terms(d1, d2, p, q)

    def cross(t):
        return 2.0 * (d1 @ t @ d2)

    def objective(t, cross_t):
        return float(np.sum((const - cross_t) * t))

    plan = np.outer(p, q)
    cross_plan = cross(plan)
    value = objective(plan, cross_plan)
    converged = False
    outer = 0
    for outer in range(1, cfg.max_outer + 1):
        grad = 2.0 * (const - cross_plan)
        target = _sinkhorn_log(grad - grad.min(), p, q, eps,
                               cfg.max_sinkhorn, cfg.tol)
        delta = target - plan
        cross_delta = cross(delta)
        # The objective along plan + t*delta is the quadratic a t^2 + b t +
        # value. Both plans share exact marginals, so <const, delta> = 0 and
        # the slope reduces to <grad, delta>.
        a = -float(np.sum(cross_delta * delta))
        b = float(np.sum(grad * delta))
        step = _line_search_quad(a, b)
        if step > 0:
            plan = plan + step * delta
            cross_plan = cross(plan)
            new_value = objective(plan, cross_plan)
        else:
            new_value = value
        if abs(value - new_value) <= cfg.tol * max(abs(value), 1.0):
            value = new_value
            converged = True
            break
        value = new_value

    if cfg.snap_permutation and n == m:
        rows, cols = scipy.optimize.linear_sum_assignment(-plan)
        hard = np.zeros_like(plan)
        hard[rows, cols] = 1.0 / n
        hard_value = objective(hard, cross(hard))
        if hard_value < value:
            plan, value = hard, hard_value
            converged = True
    if -1e-9 < value < 0.0:  # roundoff below the true zero floor
        value = 0.0
    return GWResult(float(value), plan, converged, outer)


# ---------------------------------------------------------------------------
# Curvature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurvatureSummary:
    """Per-edge augmented curvature scores with their mean and SD (population)."""

    edges_u: np.ndarray
    edges_v: np.ndarray
    values: np.ndarray
    mean: float
    sd: float


def _common_neighbor_counts(graph: Graph, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
    counts = np.empty(us.size, dtype=np.int64)
    for i, (u, v) in enumerate(zip(us, vs)):
        nu, _ = graph.neighbors(int(u))
        nv, _ = graph.neighbors(int(v))
        counts[i] = np.intersect1d(nu, nv, assume_unique=True).size
    return counts


def curvature_scores(graph: Graph, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
    """Augmented curvature of node pairs evaluated in ``graph``:

        4 - deg(u) - deg(v) + 3 * |common neighbors(u, v)|

    Degrees are neighbor counts (weights are ignored).  The pairs do not
    need to be edges of ``graph``, which lets one score the same pair in two
    different graphs.
    """
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    deg = graph.neighbor_counts()
    triangles = _common_neighbor_counts(graph, us, vs)
    return 4.0 - deg[us] - deg[vs] + 3.0 * triangles


def forman_curvature(graph: Graph) -> CurvatureSummary:
    """Curvature scores of every edge of ``graph``."""
    us, vs, _ = graph.edge_list()
    if us.size == 0:
        raise ValidationError("curvature is undefined on an edgeless graph")
    values = curvature_scores(graph, us, vs)
    return CurvatureSummary(us, vs, values, float(values.mean()),
                            float(values.std()))


# ---------------------------------------------------------------------------
# Graph reconstruction from embeddings
# ---------------------------------------------------------------------------

def reconstruct_graph(embeddings: np.ndarray, num_edges: int,
                      chunk_rows: int = 512) -> Graph:
    """Connect the ``num_edges`` closest embedding pairs.

    Pairs are ordered by distance with lexicographic ``(u, v)`` tie-breaks.
    Selection is chunked so the full pair matrix never materializes.
    """
    embeddings = np.atleast_2d(np.asarray(embeddings, dtype=np.float64))
    n = embeddings.shape[0]
    max_pairs = n * (n - 1) // 2
    if not 1 <= num_edges <= max_pairs:
        raise ValidationError(f"num_edges must lie in [1, {max_pairs}]")
    best: list[tuple[float, int, int]] = []
    cutoff = np.inf
    for lo in range(0, n, chunk_rows):
        hi = min(lo + chunk_rows, n)
        diff = embeddings[lo:hi, None, :] - embeddings[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        for row in range(lo, hi):
            cols = np.arange(row + 1, n)
            if cols.size == 0:
                continue
            d_row = dist[row - lo, row + 1:]
            keep = d_row <= cutoff
            best.extend((float(d), row, int(c))
                        for d, c in zip(d_row[keep], cols[keep]))
        if len(best) > 4 * num_edges:
            best.sort()
            best = best[:num_edges]
            cutoff = best[-1][0]
    best.sort()
    chosen = best[:num_edges]
    return build_graph(n, [(u, v) for _, u, v in chosen])


# ---------------------------------------------------------------------------
# Norm-degree profile
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProfileRow:
    bucket: str
    degree_lo: float
    degree_hi: float
    count: int
    mean_norm: float
    q25: float
    q50: float
    q75: float


def norm_degree_profile(embeddings: np.ndarray,
                        degrees: np.ndarray) -> tuple[ProfileRow, ...]:
    """Embedding-norm summary per logarithmic degree bucket (1, 2, 3-4, 5-8, ...)."""
    embeddings = np.atleast_2d(np.asarray(embeddings, dtype=np.float64))
    degrees = np.asarray(degrees, dtype=np.float64)
    if degrees.shape[0] != embeddings.shape[0]:
        raise ValidationError("degrees must align with embedding rows")
    norms = np.linalg.norm(embeddings, axis=1)
    buckets = np.full(degrees.shape, -1, dtype=np.int64)
    positive = degrees >= 1
    buckets[positive] = np.ceil(np.log2(degrees[positive])).astype(np.int64)
    rows = []
    for b in np.unique(buckets):
        members = buckets == b
        vals = norms[members]
        q25, q50, q75 = np.quantile(vals, [0.25, 0.5, 0.75])
        if b < 0:
            label, lo, hi = "0", 0.0, 0.0
        else:
            lo = 1.0 if b == 0 else 2.0 ** (b - 1) + 1.0
            hi = 2.0 ** b
            label = f"{int(lo)}" if lo == hi else f"{int(lo)}-{int(hi)}"
        rows.append(ProfileRow(label, lo, hi, int(members.sum()),
                               float(vals.mean()), float(q25), float(q50),
                               float(q75)))
    return tuple(rows)
