"""Random-weight optimisation problems: minimum spanning tree and assignment.

Edge ``e`` of the complete graph ``K_m`` joins the vertex pair at position
``e`` of the lexicographic order ``(0,1), (0,2), ..., (m-2,m-1)``.
Assignment weights are stored row-major.  Costs are summed with
:func:`math.fsum`, so a cost depends only on which edges/entries are chosen
and never on summation order.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .._validation import check_int
from ..exceptions import ArgumentError

KINDS = ("mst", "assignment")
DISTRIBUTIONS = ("uniform01", "exponential1")


@dataclass(frozen=True, eq=False)
class RandomWeightInstance:
    """Weights of one random MST or assignment instance.

    ``delta`` and ``r`` record a truncation level and a discretisation
    resolution already applied to ``weights`` (0 meaning none).
    """

    kind: str
    m: int
    weights: np.ndarray
    distribution: str = "uniform01"
    delta: float = 0.0
    r: int = 0
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ArgumentError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.distribution not in DISTRIBUTIONS:
            raise ArgumentError(f"distribution must be one of {DISTRIBUTIONS}")
        m = check_int(self.m, "m", minimum=2 if self.kind == "mst" else 1)
        w = np.array(self.weights, dtype=np.float64).reshape(-1)
        expected = m * (m - 1) // 2 if self.kind == "mst" else m * m
        if w.size != expected:
            raise ArgumentError(f"{self.kind} on m={m} needs {expected} weights, got {w.size}")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ArgumentError("weights must be finite and nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "weights", w)

    @property
    def matrix(self):
        """Assignment weights as an ``m x m`` array."""
        if self.kind != "assignment":
            raise ArgumentError("only assignment instances have a weight matrix")
        return self.weights.reshape(self.m, self.m)

    def to_dict(self):
        return {
            "kind": self.kind,
            "m": self.m,
            "distribution": self.distribution,
            "delta": self.delta,
            "r": self.r,
            "weights": [float(w) for w in self.weights],
            "seed": self.seed,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, doc):
        return cls(
            kind=doc["kind"],
            m=doc["m"],
            weights=np.asarray(doc["weights"], dtype=np.float64),
            distribution=doc.get("distribution", "uniform01"),
            delta=float(doc.get("delta", 0.0)),
            r=int(doc.get("r", 0)),
            seed=doc.get("seed"),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def weight_count(kind, m):
    return m * (m - 1) // 2 if kind == "mst" else m * m


def draw_weights(rng, size, distribution):
    u = rng.random(size)
    if distribution == "uniform01":
        return u
    if distribution == "exponential1":
        return -np.log1p(-u)
    raise ArgumentError(f"unknown distribution {distribution!r}")


def random_instance(kind, m, distribution="uniform01", seed=0):
    rng = np.random.default_rng(seed)
    w = draw_weights(rng, weight_count(kind, m), distribution)
    return RandomWeightInstance(kind, m, w, distribution=distribution, seed=seed)


def truncate_discretize_weights(w, delta, r):
    """``min(floor(r w) / r, delta)``; a zero ``r`` or ``delta`` skips that step."""
    out = np.asarray(w, dtype=np.float64)
    if r:
        out = np.floor(r * out) / r
    if delta:
        out = np.minimum(out, delta)
    return out


def truncate_discretize(inst: RandomWeightInstance, delta, r):
    """Instance with every weight replaced by ``min(floor(r Y) / r, delta)``."""
    if not delta > 0:
        raise ArgumentError(f"delta must be positive, got {delta}")
    r = check_int(r, "r", minimum=1)
    return replace(inst, weights=truncate_discretize_weights(inst.weights, delta, r), delta=float(delta), r=r)


_PAIRS: dict = {}


def _pairs(m):
    if m not in _PAIRS:
        iu, ju = np.triu_indices(m, 1)
        _PAIRS[m] = (iu.astype(np.int64), ju.astype(np.int64))
    return _PAIRS[m]


def _kruskal_scan(order, m):
    iu, ju = _pairs(m)
    parent = list(range(m))
    tree = []
    for e, a, b in zip(order.tolist(), iu[order].tolist(), ju[order].tolist()):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a != b:
            parent[a] = b
            tree.append(e)
            if len(tree) == m - 1:
                break
    return tree


def mst_edges(weights, m):
    """Edge indices of the spanning tree chosen by Kruskal's algorithm.

    Edges are scanned by weight with ties broken by edge index.  The scan
    starts from the lightest ~``4 m log m`` edges (every edge at or below a
    cut-off weight, so the order is unchanged) and falls back to all edges
    if those do not span.
    """
    w = np.asarray(weights, dtype=np.float64)
    size = w.size
    k = min(size, 4 * m * max(1, math.ceil(math.log(m))))
    if k < size:
        cutoff = np.partition(w, k - 1)[k - 1]
        cand = np.flatnonzero(w <= cutoff)
        tree = _kruskal_scan(cand[np.argsort(w[cand], kind="stable")], m)
        if len(tree) == m - 1:
            return tree
    return _kruskal_scan(np.argsort(w, kind="stable"), m)


def mst_cost(inst: RandomWeightInstance):
    """Total weight of a minimum spanning tree of ``K_m``."""
    if inst.kind != "mst":
        raise ArgumentError("mst_cost needs an mst instance")
    tree = mst_edges(inst.weights, inst.m)
    return math.fsum(inst.weights[tree].tolist())


def hungarian(cost):
    """Optimal permutation ``perm`` (row i -> column perm[i]) minimising total cost.

    Shortest-augmenting-path Hungarian method with row/column potentials,
    O(m^3); scans columns in index order so ties resolve deterministically.
    """
    a = np.asarray(cost, dtype=np.float64).tolist()
    n = len(a)
    inf = math.inf
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = a[i0 - 1]
            ui0 = u[i0]
            delta = inf
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    perm = [0] * n
    for j in range(1, n + 1):
        perm[p[j] - 1] = j - 1
    return perm


def assignment_cost(inst: RandomWeightInstance):
    """Minimum over permutations of ``sum_i Y[i, perm(i)]``."""
    if inst.kind != "assignment":
        raise ArgumentError("assignment_cost needs an assignment instance")
    mat = inst.matrix
    perm = hungarian(mat)
    return math.fsum(mat[np.arange(inst.m), perm].tolist())


def instance_cost(inst: RandomWeightInstance):
    return mst_cost(inst) if inst.kind == "mst" else assignment_cost(inst)
