"""Talagrand's convex distance on the binary cube.

The distance from ``x`` to ``A`` is ``sup_alpha min_{y in A} sum_{i: x_i != y_i} alpha_i``
over nonnegative unit vectors ``alpha``.  By minimax duality this equals the
Euclidean norm of the point of minimum norm in the convex hull of the
Hamming-difference indicators ``h_y = 1{x != y}``, which is what we compute
(Wolfe's min-norm-point method).  The maximizing ``alpha`` is the normalised
min-norm point, which gives a primal certificate for free.
"""
from __future__ import annotations

import math

import numpy as np

from ..exceptions import ArgumentError, NumericIntegrityError

MIN_NORM_TOL = 1e-9
DUALITY_TOL = 1e-6


class PointSet:
    """A nonempty set of distinct points of {0, 1}^n."""

    def __init__(self, members, n=None):
        arr = np.atleast_2d(np.asarray(members, dtype=np.int64))
        if arr.size == 0:
            raise ArgumentError("a point set must be nonempty")
        if n is not None and arr.shape[1] != n:
            raise ArgumentError(f"members have dimension {arr.shape[1]}, expected {n}")
        if np.any((arr != 0) & (arr != 1)):
            raise ArgumentError("members must be binary points")
        if len(np.unique(arr, axis=0)) != len(arr):
            raise ArgumentError("members must be distinct")
        arr.setflags(write=False)
        self.members = arr

    r = 2

    @property
    def n(self):
        return self.members.shape[1]

    def __len__(self):
        return self.members.shape[0]

    def __contains__(self, x):
        x = np.asarray(list(x))
        return bool(np.any(np.all(self.members == x, axis=1)))

    @classmethod
    def from_indices(cls, indices, n):
        idx = np.asarray(sorted(set(int(i) for i in indices)), dtype=np.int64)
        bits = (idx[:, None] >> np.arange(n - 1, -1, -1)) & 1
        return cls(bits, n)

    @classmethod
    def random(cls, size, n, rng):
        idx = rng.choice(2**n, size=size, replace=False)
        return cls.from_indices(idx, n)


def _affine_minimizer(P):
    """Weights of the min-norm point of the affine hull of the rows of ``P``."""
    k = P.shape[0]
    if k == 1:
        return np.ones(1)
    G = P @ P.T
    M = np.zeros((k + 1, k + 1))
    M[:k, :k] = G
    M[:k, k] = 1.0
    M[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
    w = sol[:k]
    return w / w.sum()


def min_norm_point(points, tol=MIN_NORM_TOL, max_iter=10_000):
    """Point of minimum Euclidean norm in the convex hull of ``points`` (rows).

    Returns ``(point, weights)`` where ``weights`` is a convex combination of
    the rows giving ``point``.
    """
    P = np.asarray(points, dtype=np.float64)
    m = P.shape[0]
    sq = np.einsum("ij,ij->i", P, P)
    start = int(np.argmin(sq))
    active = [start]
    lam = np.ones(1)
    x = P[start].copy()
    scale = max(1.0, float(sq.max()))
    for _ in range(max_iter):
        norm_sq = float(x @ x)
        if norm_sq <= tol * tol:
            break
        dots = P @ x
        j = int(np.argmin(dots))
        if norm_sq - dots[j] <= tol * scale or j in active:
            break
        active.append(j)
        lam = np.append(lam, 0.0)
        while True:
            w = _affine_minimizer(P[active])
            if np.all(w > 0.0):
                lam = w
                break
            neg = w <= 0.0
            denom = lam[neg] - w[neg]
            ratios = np.where(denom > 0, lam[neg] / np.where(denom > 0, denom, 1.0), 1.0)
            theta = min(max(float(np.min(ratios)), 0.0), 1.0)
            lam = theta * w + (1.0 - theta) * lam
            keep = lam > 0.0
            keep[int(np.argmax(lam))] = True
            active = [a for a, k in zip(active, keep) if k]
            lam = lam[keep] / lam[keep].sum()
        new_x = lam @ P[active]
        if float(new_x @ new_x) >= norm_sq:
            # no strict decrease: numerically at the optimum
            break
        x = new_x
    weights = np.zeros(m)
    weights[active] = lam
    return x, weights


def _primal_value(alpha, H):
    return float(np.min(H @ alpha))


def _projected_ascent(H, rng, iters=300):
    n = H.shape[1]
    alpha = np.abs(rng.standard_normal(n))
    alpha /= np.linalg.norm(alpha)
    best = _primal_value(alpha, H)
    for t in range(1, iters + 1):
        g = H[int(np.argmin(H @ alpha))]
        alpha = np.maximum(alpha + g / math.sqrt(t), 0.0)
        norm = np.linalg.norm(alpha)
        if norm == 0.0:
            alpha = np.full(n, 1.0 / math.sqrt(n))
        else:
            alpha /= norm
        best = max(best, _primal_value(alpha, H))
    return best


def hamming_indicators(x, A: PointSet):
    x = np.asarray(list(x), dtype=np.int64)
    if x.size != A.n:
        raise ArgumentError(f"point has dimension {x.size}, set has {A.n}")
    return (A.members != x).astype(np.float64)


def convex_distance(x, A: PointSet, restarts=32, seed=0):
    """Convex distance from the binary point ``x`` to ``A``.

    The dual (min-norm point) value is always certified by evaluating the
    primal objective at the induced unit vector.  With ``restarts > 0`` the
    value is also compared against projected supergradient ascent on the
    primal from ``restarts`` starting points (one of them the certificate);
    no primal value may exceed the dual and the best must agree with it
    within ``1e-6``.
    """
    if getattr(x, "r", 2) != 2:
        raise ArgumentError("convex distance is defined on the binary cube")
    if A is None or len(A) == 0:
        raise ArgumentError("A must be nonempty")
    H = hamming_indicators(x, A)
    p, _ = min_norm_point(H)
    dist = float(np.linalg.norm(p))
    if dist <= MIN_NORM_TOL:
        return 0.0
    alpha = np.maximum(p, 0.0) / dist
    certified = _primal_value(alpha, H)
    if certified < dist - DUALITY_TOL:
        raise NumericIntegrityError(
            f"duality gap: primal value {certified} at the dual certificate, dual {dist}"
        )
    if restarts > 0:
        rng = np.random.default_rng(seed)
        best = certified
        for _ in range(restarts - 1):
            lower = _projected_ascent(H, rng)
            if lower > dist + DUALITY_TOL:
                raise NumericIntegrityError(f"primal value {lower} exceeds dual value {dist}")
            best = max(best, lower)
        if abs(best - dist) > DUALITY_TOL:
            raise NumericIntegrityError(f"primal {best} and dual {dist} disagree")
    return dist


def convex_distance_table(A: PointSet, restarts=0):
    """Convex distance from every point of {0, 1}^n, in table index order."""
    from ..cube import TabulatedFunction, cube_points

    pts = cube_points(2, A.n)
    vals = np.array([convex_distance(p, A, restarts=restarts) for p in pts])
    return TabulatedFunction(2, A.n, vals)
