"""Certified and sampled bounded-difference profiles.

For a point ``x`` and coordinate ``i`` the increments are
``f(x) - f(x^(i))`` (bit flip) on the binary cube.  On the r-ary cube the
flip is replaced by the worst shift ``x_{i,j}``, ``j != 0``, for the
``v_plus``/``v_minus``/``B`` fields, and the discrete derivative
``Delta_i f(x) = f(x) - mean_j f(x_{i,j})`` feeds ``v_delta_minus`` and
``B_delta``.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .._config import check_capacity
from .._validation import check_int
from ..bounds import PhiSpec
from ..cube import CubePoint, TabulatedFunction
from ..exceptions import ArgumentError

FIELDS = ("v_plus", "v_minus", "v_delta_minus", "B", "B_delta")


@dataclass(frozen=True)
class DerivativeProfile:
    v_plus: float
    v_minus: float
    v_delta_minus: float
    B: float
    B_delta: float
    certification: str = "exact"
    r: int = 2
    n: int = 1
    samples: int | None = None
    witness: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in FIELDS:
            if getattr(self, name) < 0:
                raise ArgumentError(f"{name} must be nonnegative")
        if self.certification not in ("exact", "sampled"):
            raise ArgumentError(f"unknown certification {self.certification!r}")
        if self.certification == "sampled" and not self.samples:
            raise ArgumentError("sampled profiles must record their sample count")

    @property
    def is_lower_bound(self):
        """Sampled suprema only bound the true values from below."""
        return self.certification == "sampled"

    def to_dict(self):
        return asdict(self)


def _exact_fields(arr, r):
    n = arr.ndim
    plus_sum = np.zeros_like(arr)
    minus_sum = np.zeros_like(arr)
    dminus_sum = np.zeros_like(arr)
    B = B_delta = 0.0
    for axis in range(n):
        diffs = np.stack([arr - np.roll(arr, -j, axis=axis) for j in range(1, r)])
        pos = np.max(np.maximum(diffs, 0.0), axis=0)
        neg = np.max(np.maximum(-diffs, 0.0), axis=0)
        plus_sum += pos * pos
        minus_sum += neg * neg
        B = max(B, float(np.max(np.abs(diffs))))
        delta = arr - arr.mean(axis=axis, keepdims=True)
        dneg = np.maximum(-delta, 0.0)
        dminus_sum += dneg * dneg
        B_delta = max(B_delta, float(np.max(np.abs(delta))))
    return plus_sum, minus_sum, dminus_sum, B, B_delta


def _argmax_point(table, r):
    idx = int(np.argmax(table))
    return list(CubePoint.from_index(idx, r, table.ndim).coords)


def exact_profile(f: TabulatedFunction):
    check_capacity(f.r, f.n)
    arr = f.as_array()
    plus_sum, minus_sum, dminus_sum, B, B_delta = _exact_fields(arr, f.r)
    witness = {
        "v_plus": _argmax_point(plus_sum, f.r),
        "v_minus": _argmax_point(minus_sum, f.r),
        "v_delta_minus": _argmax_point(dminus_sum, f.r),
    }
    return DerivativeProfile(
        v_plus=float(plus_sum.max()),
        v_minus=float(minus_sum.max()),
        v_delta_minus=float(dminus_sum.max()),
        B=B,
        B_delta=B_delta,
        certification="exact",
        r=f.r,
        n=f.n,
        witness=witness,
    )


class TableEvaluator:
    """Batch evaluator backed by a table (picklable, unlike a closure)."""

    def __init__(self, f: TabulatedFunction):
        self.values = f.values
        self.mult = f.r ** np.arange(f.n - 1, -1, -1)

    def __call__(self, X):
        return self.values[np.asarray(X) @ self.mult]


def _neighbors(x, r):
    """``x`` followed by every single-coordinate shift, ordered by (i, j)."""
    n = x.size
    rows = np.repeat(x[None, :], 1 + n * (r - 1), axis=0)
    k = 1
    for i in range(n):
        for j in range(1, r):
            rows[k, i] = (x[i] + j) % r
            k += 1
    return rows


def local_stats(evaluator, x, r):
    """Per-point sums ``(plus, minus, delta_minus, B, B_delta)`` at ``x``."""
    x = np.asarray(x, dtype=np.int64)
    n = x.size
    vals = np.asarray(evaluator(_neighbors(x, r)), dtype=np.float64)
    fx = vals[0]
    diffs = (fx - vals[1:]).reshape(n, r - 1)
    pos = np.max(np.maximum(diffs, 0.0), axis=1)
    neg = np.max(np.maximum(-diffs, 0.0), axis=1)
    delta = diffs.sum(axis=1) / r
    dneg = np.maximum(-delta, 0.0)
    return np.array(
        [
            float(pos @ pos),
            float(neg @ neg),
            float(dneg @ dneg),
            float(np.max(np.abs(diffs))) if diffs.size else 0.0,
            float(np.max(np.abs(delta))),
        ]
    )


def _stats_chunk(args):
    evaluator, points, r = args
    return np.array([local_stats(evaluator, p, r) for p in points]).reshape(-1, len(FIELDS))


def _hill_climb(evaluator, x, r, target, rng, max_moves, max_steps):
    col = FIELDS.index(target)
    current = local_stats(evaluator, x, r)
    x = np.asarray(x, dtype=np.int64).copy()
    n = x.size
    for _ in range(max_steps):
        moves = [(i, j) for i in range(n) for j in range(1, r)]
        if max_moves is not None and len(moves) > max_moves:
            pick = rng.choice(len(moves), size=max_moves, replace=False)
            moves = [moves[p] for p in sorted(pick)]
        best, best_x = current, None
        for i, j in moves:
            y = x.copy()
            y[i] = (y[i] + j) % r
            stats = local_stats(evaluator, y, r)
            if stats[col] > best[col]:
                best, best_x = stats, y
        if best_x is None:
            break
        current, x = best, best_x
    return current, x


def derivative_profile(
    f,
    mode="exact",
    *,
    r=None,
    n=None,
    samples=1000,
    seed=0,
    target="v_plus",
    climb=10,
    max_moves=256,
    max_steps=50,
    workers=1,
):
    """Profile the bounded-difference quantities of ``f``.

    ``mode="exact"`` enumerates a :class:`TabulatedFunction`.  ``mode="sampled"``
    takes a batch evaluator (``(k, n)`` integer array -> ``k`` values), draws
    ``samples`` seeded uniform points, then greedily hill-climbs the ``climb``
    best points on ``target`` by single-coordinate moves (at most
    ``max_moves`` random moves per step).  Sampled values are lower bounds on
    the true suprema.  Results do not depend on ``workers``.
    """
    if mode == "exact":
        if not isinstance(f, TabulatedFunction):
            if r is None or n is None:
                raise ArgumentError("exact profiling of an evaluator needs r and n")
            check_capacity(r, n)
            from ..cube import cube_points

            f = TabulatedFunction(r, n, np.asarray(f(cube_points(r, n)), dtype=np.float64))
        return exact_profile(f)
    if mode != "sampled":
        raise ArgumentError(f"mode must be 'exact' or 'sampled', got {mode!r}")
    if target not in FIELDS:
        raise ArgumentError(f"target must be one of {FIELDS}")
    if isinstance(f, TabulatedFunction):
        r, n = f.r, f.n
        evaluator = TableEvaluator(f)
    else:
        evaluator = f
        if r is None or n is None:
            raise ArgumentError("sampled profiling of an evaluator needs r and n")
    r = check_int(r, "r", minimum=2)
    n = check_int(n, "n", minimum=1)
    samples = check_int(samples, "samples", minimum=1)
    rng = np.random.default_rng(seed)
    points = rng.integers(0, r, size=(samples, n))

    workers = check_int(workers, "workers", minimum=1)
    if workers == 1:
        stats = _stats_chunk((evaluator, points, r))
    else:
        chunks = np.array_split(points, workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            stats = np.vstack(list(pool.map(_stats_chunk, [(evaluator, c, r) for c in chunks])))

    best = stats.max(axis=0)
    col = FIELDS.index(target)
    witness = {target: points[int(np.argmax(stats[:, col]))].tolist()}
    top = np.argsort(-stats[:, col], kind="stable")[: min(climb, samples)]
    for rank, idx in enumerate(top):
        climb_rng = np.random.default_rng([seed, rank])
        climbed, x = _hill_climb(evaluator, points[idx], r, target, climb_rng, max_moves, max_steps)
        if climbed[col] > best[col]:
            witness[target] = x.tolist()
        best = np.maximum(best, climbed)
    return DerivativeProfile(
        *[float(v) for v in best],
        certification="sampled",
        r=r,
        n=n,
        samples=samples,
        witness=witness,
    )


@dataclass(frozen=True)
class SelfBoundingResult:
    holds: bool
    witness: list | None = None
    clause: str | None = None
    achieved: float | None = None
    allowed: float | None = None
    max_increment: float = 0.0


def self_bounding_check(f: TabulatedFunction, phi: PhiSpec, B_cap, tol=1e-9):
    """Exhaustively check ``|f(x) - f(x^(i))| <= B_cap`` and ``sum_i (f(x) - f(x^(i)))_+^2 <= phi(f(x))``.

    On failure the first violating point (in index order) is returned along
    with the achieved and allowed values.
    """
    if f.r != 2:
        raise ArgumentError("the self-bounding condition is checked on the binary cube")
    check_capacity(f.r, f.n)
    arr = f.as_array()
    diffs = np.stack([arr - np.flip(arr, axis=axis) for axis in range(f.n)])
    max_abs = np.max(np.abs(diffs), axis=0)
    max_increment = float(max_abs.max())
    bad = np.flatnonzero(max_abs.reshape(-1) > B_cap + tol)
    if bad.size:
        idx = int(bad[0])
        return SelfBoundingResult(
            False,
            list(CubePoint.from_index(idx, 2, f.n).coords),
            "bounded_difference",
            float(max_abs.reshape(-1)[idx]),
            float(B_cap),
            max_increment,
        )
    energy = np.sum(np.maximum(diffs, 0.0) ** 2, axis=0).reshape(-1)
    allowed = np.array([phi(v) for v in f.values])
    bad = np.flatnonzero(energy > allowed + tol * np.maximum(1.0, np.abs(allowed)))
    if bad.size:
        idx = int(bad[0])
        return SelfBoundingResult(
            False,
            list(CubePoint.from_index(idx, 2, f.n).coords),
            "self_bounding",
            float(energy[idx]),
            float(allowed[idx]),
            max_increment,
        )
    return SelfBoundingResult(True, max_increment=max_increment)
