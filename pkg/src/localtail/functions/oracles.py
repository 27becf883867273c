"""Brute-force references for the example functions (small sizes only)."""
import itertools
import math

import numpy as np

from ..exceptions import ArgumentError


def lis_length_brute(x):
    x = list(x)
    best = 0
    for mask in range(1, 2 ** len(x)):
        sub = [v for i, v in enumerate(x) if mask >> i & 1]
        if all(a <= b for a, b in zip(sub, sub[1:])):
            best = max(best, len(sub))
    return best


def count_nondecreasing_brute(x):
    x = list(x)
    count = 0
    for mask in range(1, 2 ** len(x)):
        sub = [v for i, v in enumerate(x) if mask >> i & 1]
        if all(a <= b for a, b in zip(sub, sub[1:])):
            count += 1
    return count


def mst_cost_brute(weights, m):
    """Minimum over all (m-1)-edge subsets of K_m that form a spanning tree."""
    if m > 7:
        raise ArgumentError("brute-force MST is limited to m <= 7")
    pairs = list(itertools.combinations(range(m), 2))
    w = np.asarray(weights, dtype=np.float64)
    best = math.inf
    for subset in itertools.combinations(range(len(pairs)), m - 1):
        parent = list(range(m))

        def find(a):
            while parent[a] != a:
                a = parent[a]
            return a

        ok = True
        for e in subset:
            a, b = find(pairs[e][0]), find(pairs[e][1])
            if a == b:
                ok = False
                break
            parent[a] = b
        if ok:
            best = min(best, math.fsum(w[list(subset)].tolist()))
    return best


def assignment_cost_brute(matrix):
    """Minimum over all m! permutations."""
    mat = np.asarray(matrix, dtype=np.float64)
    m = mat.shape[0]
    if m > 8:
        raise ArgumentError("brute-force assignment is limited to m <= 8")
    perms = np.array(list(itertools.permutations(range(m))), dtype=np.int64)
    totals = mat[np.arange(m), perms].sum(axis=1)
    # re-sum the near-optimal candidates exactly so ties are compared fairly
    lo = totals.min()
    cand = perms[totals <= lo + 1e-9 * max(1.0, abs(lo))]
    return min(math.fsum(mat[np.arange(m), p].tolist()) for p in cand)


def largest_eigenvalue_power(adj, iters=2000):
    """Power iteration on ``A + c I`` (shifted to be positive semidefinite)."""
    adj = np.asarray(adj, dtype=np.float64)
    m = adj.shape[0]
    shift = m
    v = np.ones(m) / math.sqrt(m)
    lam = 0.0
    for _ in range(iters):
        w = adj @ v + shift * v
        norm = np.linalg.norm(w)
        if norm == 0:
            return 0.0
        v = w / norm
        lam = float(v @ adj @ v)
    return lam
