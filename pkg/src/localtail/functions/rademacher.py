"""Suprema of Rademacher-type averages over a finite family of vectors."""
from __future__ import annotations

import numpy as np

from ..exceptions import ArgumentError


class VectorFamily:
    """A finite set of real n-vectors, each of Euclidean norm at most one."""

    def __init__(self, vectors):
        arr = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
        if arr.ndim != 2 or arr.shape[0] == 0:
            raise ArgumentError("a vector family needs at least one n-vector")
        if not np.all(np.isfinite(arr)):
            raise ArgumentError("vectors must be finite")
        norms = np.linalg.norm(arr, axis=1)
        if np.any(norms > 1.0 + 1e-12):
            raise ArgumentError(f"vector norm {norms.max()} exceeds 1")
        arr = arr.copy()
        arr.setflags(write=False)
        self.vectors = arr

    @property
    def n(self):
        return self.vectors.shape[1]

    def __len__(self):
        return self.vectors.shape[0]

    @classmethod
    def random(cls, size, n, rng):
        """``size`` vectors drawn uniformly from the unit ball of R^n."""
        g = rng.standard_normal((size, n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        radius = rng.random(size) ** (1.0 / n)
        # keep strictly inside the ball so rounding never breaks the norm check
        return cls(g * radius[:, None] * (1.0 - 1e-12))

    def sup(self, X):
        """Batched version of :func:`rademacher_sup` for rows of ``X``."""
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.n:
            raise ArgumentError(f"points have dimension {X.shape[-1]}, family has {self.n}")
        return np.max((X - 0.5) @ self.vectors.T, axis=-1)


def rademacher_sup(x, family: VectorFamily):
    """``max_{alpha in A} sum_i alpha_i (x_i - 1/2)`` for a binary point ``x``."""
    r = getattr(x, "r", 2)
    if r != 2:
        raise ArgumentError("Rademacher averages are defined on the binary cube")
    coords = np.asarray(list(x), dtype=np.float64)
    if coords.size != family.n:
        raise ArgumentError(f"point has dimension {coords.size}, family has {family.n}")
    return float(family.sup(coords[None, :])[0])
