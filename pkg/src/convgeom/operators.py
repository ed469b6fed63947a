"""Two parametrized families of spatial graph-convolution operators.

Both families start from the self-loop-augmented adjacency: the diagonal
carries weight ``beta`` and the augmented degree of node ``u`` is
``d_u + beta`` (weighted degree plus the loop).

Symmetric family:
    S[u, v] = w(u, v) * (d_u + beta)^(-alpha) * (d_v + beta)^(-alpha)
    S[u, u] = beta * (d_u + beta)^(-2 * alpha)

Row-normalized family: the symmetric operator with every row rescaled to
sum to one.  The self-loop term keeps its ``beta`` weight before the
normalization; an alternative convention drops that factor on the self term,
which is not what this module implements.

``alpha`` interpolates between plain aggregation (0) and full degree
discounting (1); ``beta`` is the self-loop strength.  ``alpha = 0.5``,
``beta = 1`` reproduces the standard symmetric GCN propagation matrix, and
``alpha = 0``, ``beta = 1`` gives adjacency-plus-identity aggregation.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import ValidationError
from .graphs import Graph

FAMILY_SYMMETRIC = "symmetric"
FAMILY_ROW_NORMALIZED = "row_normalized"
FAMILIES = (FAMILY_SYMMETRIC, FAMILY_ROW_NORMALIZED)


@dataclass(frozen=True)
class ConvParams:
    """Operator-family selector: exponent ``alpha``, self-loop weight ``beta``."""

    alpha: float
    beta: float
    family: str = FAMILY_SYMMETRIC

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValidationError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.beta < 0.0:
            raise ValidationError(f"beta must be non-negative, got {self.beta}")
        if self.family not in FAMILIES:
            raise ValidationError(f"family must be one of {FAMILIES}")


@dataclass(frozen=True)
class SparseOperator:
    """A built convolution operator: CSR matrix plus its parameters."""

    matrix: sp.csr_matrix
    params: ConvParams
    aug_degrees: np.ndarray

    @cached_property
    def matrix_t(self) -> sp.csr_matrix:
        """Transpose in CSR form (the matrix itself for the symmetric family)."""
        if self.params.family == FAMILY_SYMMETRIC:
            return self.matrix
        return self.matrix.T.tocsr()

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Sparse-dense product ``S @ x``."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[0] != self.matrix.shape[0]:
            raise ValidationError(
                f"operator is {self.matrix.shape[0]}x{self.matrix.shape[1]} "
                f"but input has {x.shape[0]} rows")
        return self.matrix @ x

    def apply_transpose(self, x: np.ndarray) -> np.ndarray:
        """Sparse-dense product ``S.T @ x`` (used by backpropagation)."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[0] != self.matrix.shape[0]:
            raise ValidationError(
                f"operator is {self.matrix.shape[0]}x{self.matrix.shape[0]} "
                f"but input has {x.shape[0]} rows")
        return self.matrix_t @ x

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


def _check_degree_support(graph: Graph, alpha: float, beta: float) -> None:
    if beta == 0.0 and alpha > 0.0:
        isolated = np.nonzero(graph.degrees == 0.0)[0]
        if isolated.size:
            raise ValidationError(
                f"node {int(isolated[0])} is isolated: degree 0 with beta=0 "
                f"makes the normalizer (d+beta)^(-alpha) undefined")


def _symmetric_entries(graph: Graph, alpha: float, beta: float):
    """COO entries (rows, cols, vals) of the symmetric operator."""
    aug = graph.degrees + beta
    # power(0, -0.0) == 1, so alpha == 0 needs no special casing even on
    # isolated nodes; alpha > 0 with a zero augmented degree is rejected above.
    factors = np.power(aug, -alpha)
    rows = graph.expanded_rows()
    cols = graph.col_indices
    vals = graph.edge_weights * factors[rows] * factors[cols]
    if beta > 0.0:
        diag = np.arange(graph.num_nodes)
        rows = np.concatenate([rows, diag])
        cols = np.concatenate([cols, diag])
        vals = np.concatenate([vals, beta * factors * factors])
    return rows, cols, vals, aug


def build_symmetric(graph: Graph, alpha: float, beta: float) -> SparseOperator:
    """Build the symmetric-family operator for ``(alpha, beta)``."""
    params = ConvParams(alpha, beta, FAMILY_SYMMETRIC)
    _check_degree_support(graph, alpha, beta)
    rows, cols, vals, aug = _symmetric_entries(graph, alpha, beta)
    n = graph.num_nodes
    matrix = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    return SparseOperator(matrix, params, aug)


def build_row_normalized(graph: Graph, alpha: float, beta: float) -> SparseOperator:
    """Build the row-normalized operator: each symmetric row rescaled to sum 1."""
    params = ConvParams(alpha, beta, FAMILY_ROW_NORMALIZED)
    _check_degree_support(graph, alpha, beta)
    rows, cols, vals, aug = _symmetric_entries(graph, alpha, beta)
    n = graph.num_nodes
    sums = np.bincount(rows, weights=vals, minlength=n)
    dead = np.nonzero(sums <= 0.0)[0]
    if dead.size:
        raise ValidationError(
            f"node {int(dead[0])} has an empty operator row (degree 0 with "
            f"beta=0); row normalization is undefined")
    matrix = sp.coo_matrix((vals / sums[rows], (rows, cols)), shape=(n, n)).tocsr()
    return SparseOperator(matrix, params, aug)


def build_operator(graph: Graph, params: ConvParams) -> SparseOperator:
    """Dispatch on ``params.family``."""
    if params.family == FAMILY_SYMMETRIC:
        return build_symmetric(graph, params.alpha, params.beta)
    return build_row_normalized(graph, params.alpha, params.beta)


def apply(op: SparseOperator, x: np.ndarray) -> np.ndarray:
    """Functional alias for ``op.apply(x)``."""
    return op.apply(x)
