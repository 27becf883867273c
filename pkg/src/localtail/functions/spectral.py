"""Largest adjacency eigenvalue of a graph encoded as a binary edge vector."""
import math

import numpy as np

from ..exceptions import ArgumentError


def vertices_for_edges(n):
    """``m`` with ``m (m - 1) / 2 == n``; raises if ``n`` is not triangular."""
    m = (1 + math.isqrt(1 + 8 * n)) // 2
    if m < 2 or m * (m - 1) // 2 != n:
        raise ArgumentError(f"{n} is not the edge count of a complete graph on m >= 2 vertices")
    return m


def edge_pairs(m):
    """Vertex pairs ``(0,1), (0,2), ..., (m-2,m-1)``: the edge order used throughout."""
    return np.triu_indices(m, 1)


def adjacency_matrices(X, m):
    """Stack of symmetric 0/1 adjacency matrices for rows of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    iu, ju = edge_pairs(m)
    adj = np.zeros((X.shape[0], m, m))
    adj[:, iu, ju] = X
    adj[:, ju, iu] = X
    return adj


def largest_eigenvalues(X, m):
    """Batched largest adjacency eigenvalue for edge vectors in the rows of ``X``."""
    return np.linalg.eigvalsh(adjacency_matrices(X, m))[:, -1]


def adjacency_largest_eigenvalue(x):
    """Largest eigenvalue of the graph whose edge indicators are ``x``.

    Edges follow the lexicographic pair order of :func:`edge_pairs`.
    """
    coords = np.asarray(list(x), dtype=np.float64)
    if getattr(x, "r", 2) != 2 or np.any((coords != 0) & (coords != 1)):
        raise ArgumentError("edge indicators must be binary")
    m = vertices_for_edges(coords.size)
    value = float(largest_eigenvalues(coords[None, :], m)[0])
    # exact zero for the empty graph rather than -0.0 / 1e-17 noise
    return 0.0 if abs(value) < 1e-12 else value
