"""Experiment drivers: build a function, profile it, measure quantiles, report gaps.

All randomness derives from ``ExperimentConfig.seed``.  The worker count is
deliberately left out of the report so that reports are byte-identical for
any degree of parallelism.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from ._config import check_capacity
from ._validation import check_int
from .bounds import PhiSpec, mst_truncation_failure_bound, subgaussian_tail
from .cube import TabulatedFunction, cube_points
from .exceptions import ArgumentError
from .functions.convex import PointSet, convex_distance_table
from .functions.lis import lis_length
from .functions.profile import derivative_profile, exact_profile
from .functions.rademacher import VectorFamily
from .functions.spectral import largest_eigenvalues
from .functions.weights import (
    DISTRIBUTIONS,
    assignment_cost,
    draw_weights,
    hungarian,
    mst_edges,
    truncate_discretize_weights,
    weight_count,
)
from .quantiles import exact_quantiles, gap_report, mc_quantiles
from .sampling import sample_values

ZETA2 = math.pi**2 / 6.0
ZETA3 = 1.2020569031595942
KINDS = ("mst", "assignment", "lis", "eigen", "convex-distance", "rademacher")


def inverse_square_sum(m):
    """``sum_{i=1}^m i^-2``, the exact mean cost of the exponential assignment problem."""
    return math.fsum(1.0 / (i * i) for i in range(1, m + 1))


def truncation_level(c, m):
    return c * math.log(m) / m


def adaptive_c(k, m):
    """Truncation constant keeping the truncation failure below ``2^-k``."""
    return max(2.0, 4.0 * (k + 2) * math.log(2.0) / math.log(m))


@dataclass
class ExperimentConfig:
    kind: str
    seed: int
    samples: int = 100_000
    m: int | None = None
    n: int | None = None
    dist: str = "uniform01"
    c: float = 2.0
    adaptive_c: bool = False
    r: int | None = None
    K: int | None = None
    beta: float = 1e-3
    family: str = "random20"
    theorem: str | None = None
    profile_samples: int = 8
    workers: int = field(default=1, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ArgumentError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.seed is None:
            raise ArgumentError("experiments need an explicit seed")
        check_int(self.seed, "seed", minimum=0)
        check_int(self.samples, "samples", minimum=1)
        if self.dist not in DISTRIBUTIONS:
            raise ArgumentError(f"dist must be one of {DISTRIBUTIONS}")
        if self.m is not None:
            check_int(self.m, "m", minimum=2)
        if self.r is not None:
            check_int(self.r, "r", minimum=1)

    def to_dict(self):
        doc = asdict(self)
        doc.pop("workers")
        return doc

    @classmethod
    def from_dict(cls, doc, workers=1):
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in doc.items() if k in names}, workers=workers)


# -- picklable samplers and evaluators ---------------------------------------


class RademacherSampler:
    def __init__(self, vectors):
        self.family = VectorFamily(vectors)

    def __call__(self, rng, size):
        return self.family.sup(rng.integers(0, 2, size=(size, self.family.n)))


class EigenSampler:
    def __init__(self, m):
        self.m = m
        self.n = m * (m - 1) // 2

    def __call__(self, rng, size):
        return largest_eigenvalues(rng.integers(0, 2, size=(size, self.n)), self.m)


class EigenEvaluator:
    def __init__(self, m):
        self.m = m

    def __call__(self, X):
        return largest_eigenvalues(X, self.m)


class LisEvaluator:
    def __call__(self, X):
        return np.array([lis_length(row) for row in np.asarray(X).tolist()], dtype=np.float64)


class LisSampler:
    def __init__(self, n, r):
        self.n, self.r = n, r

    def __call__(self, rng, size):
        return LisEvaluator()(rng.integers(0, self.r, size=(size, self.n)))


class WeightSampler:
    """Costs of random MST / assignment instances.

    Columns: raw cost, then the truncated-discretised cost for each
    truncation level, then (MST only) the truncated-only cost per level.
    """

    def __init__(self, kind, m, dist, deltas, r):
        self.kind, self.m, self.dist = kind, m, dist
        self.deltas = tuple(deltas)
        self.r = r

    def __call__(self, rng, size):
        count = weight_count(self.kind, self.m)
        d = len(self.deltas)
        width = 1 + (2 * d if self.kind == "mst" else d)
        out = np.empty((size, width))
        rows = np.arange(self.m)
        for s in range(size):
            w = draw_weights(rng, count, self.dist)
            if self.kind == "mst":
                tree = mst_edges(w, self.m)
                chosen = w[tree]
                out[s, 0] = math.fsum(chosen.tolist())
                for t, delta in enumerate(self.deltas):
                    out[s, 1 + t] = math.fsum(truncate_discretize_weights(chosen, delta, self.r).tolist())
                    out[s, 1 + d + t] = math.fsum(np.minimum(chosen, delta).tolist())
            else:
                mat = w.reshape(self.m, self.m)
                out[s, 0] = math.fsum(mat[rows, hungarian(mat)].tolist())
                for t, delta in enumerate(self.deltas):
                    tm = truncate_discretize_weights(mat, delta, self.r)
                    out[s, 1 + t] = math.fsum(tm[rows, hungarian(tm)].tolist())
        return out


class TruncatedCostEvaluator:
    """Cost as a function of the discretised weights ``X`` in ``{0..r-1}^n``."""

    def __init__(self, kind, m, delta, r):
        self.kind, self.m, self.delta, self.r = kind, m, delta, r

    def __call__(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        w = np.minimum(X / self.r, self.delta)
        out = np.empty(len(w))
        rows = np.arange(self.m)
        for s, row in enumerate(w):
            if self.kind == "mst":
                out[s] = math.fsum(row[mst_edges(row, self.m)].tolist())
            else:
                mat = row.reshape(self.m, self.m)
                out[s] = math.fsum(mat[rows, hungarian(mat)].tolist())
        return out


# -- helpers ------------------------------------------------------------------


def _moments(values):
    values = np.asarray(values, dtype=np.float64)
    N = values.size
    mean = float(np.mean(values))
    var = float(np.var(values, ddof=1)) if N > 1 else 0.0
    centred = values - mean
    m4 = float(np.mean(centred**4))
    return {
        "mean": mean,
        "mean_se": math.sqrt(var / N),
        "variance": var,
        "variance_se": math.sqrt(max(m4 - var * var, 0.0) / N),
        "N": N,
    }


def _step_gaps(a):
    one = [a[i + 1] - a[i] for i in range(len(a) - 1)]
    two = [a[i + 1] - a[i - 1] for i in range(1, len(a) - 1)]
    return one, two


def _rows_for(series, theorem, v):
    """Rows for one theorem, or for both sub-Gaussian forms when none is named."""
    theorems = (theorem,) if theorem else ("thm22", "adjacent")
    rows = []
    for name in theorems:
        rows.extend(gap_report(series, None, name, v=v, v_cert="analytic").rows)
    rows.sort(key=lambda row: (row.k, theorems.index(row.theorem)))
    return rows


def _profile_summary(profile):
    doc = profile.to_dict()
    doc.pop("witness", None)
    return doc


# -- experiment kinds ---------------------------------------------------------


def _weights_experiment(cfg: ExperimentConfig):
    kind = cfg.kind
    m = cfg.m if cfg.m is not None else (200 if kind == "mst" else 10)
    r = cfg.r if cfg.r is not None else m * m
    N = cfg.samples
    from .quantiles import max_level

    K = cfg.K if cfg.K is not None else max_level(N)
    if cfg.adaptive_c:
        cs = [adaptive_c(k, m) for k in range(1, K)]
    else:
        cs = [float(cfg.c)]
    distinct = sorted(set(cs))
    deltas = [truncation_level(c, m) for c in distinct]
    sampler = WeightSampler(kind, m, cfg.dist, deltas, r)
    data = sample_values(sampler, N, cfg.seed, workers=cfg.workers)
    raw = data[:, 0]

    stats = _moments(raw)
    if kind == "assignment":
        reference = inverse_square_sum(m) if cfg.dist == "exponential1" else ZETA2
        reference_name = "sum_inverse_squares" if cfg.dist == "exponential1" else "zeta2_limit"
    else:
        reference = ZETA3
        reference_name = "zeta3_limit"
    stats["reference_mean"] = reference
    stats["reference_name"] = reference_name
    stats["z_score"] = (stats["mean"] - reference) / stats["mean_se"] if stats["mean_se"] > 0 else 0.0

    raw_series = mc_quantiles(None, N, K=K, beta=cfg.beta, seed=cfg.seed, values=raw)
    one, two = _step_gaps(raw_series.a)

    sub_reports = []
    rows = []
    for t, (c, delta) in enumerate(zip(distinct, deltas)):
        tilde = data[:, 1 + t]
        series = mc_quantiles(None, N, K=K, beta=cfg.beta, seed=cfg.seed, values=tilde)
        v = m * delta * delta
        rep = gap_report(series, None, "cor41", v=v, B=delta, r=r, v_cert="analytic")
        entry = {
            "c": c,
            "delta": delta,
            "v": v,
            "B": delta,
            "truncated_mean": float(np.mean(tilde)),
            "a": series.a,
        }
        if kind == "mst":
            bar = data[:, 1 + len(distinct) + t]
            entry["max_discretization_error"] = float(np.max(np.abs(bar - tilde)))
            entry["discretization_error_bound"] = m / r
            entry["truncation_failure_bound"] = mst_truncation_failure_bound(m, c) if c >= 2 else None
            entry["truncation_changed_fraction"] = float(np.mean(bar != raw))
        sub_reports.append(entry)
        if cfg.adaptive_c:
            rows.extend(row for row in rep.rows if cs[min(row.k, len(cs)) - 1] == c)
        else:
            rows = rep.rows
    rows.sort(key=lambda row: row.k)

    # bounded-difference check of the analytic constants on a small instance
    pm = min(m, 5 if kind == "mst" else 4)
    pr = pm * pm
    pdelta = truncation_level(distinct[0], pm)
    pn = weight_count(kind, pm)
    profile = derivative_profile(
        TruncatedCostEvaluator(kind, pm, pdelta, pr),
        "sampled",
        r=pr,
        n=pn,
        samples=cfg.profile_samples,
        seed=cfg.seed,
        target="v_delta_minus",
        climb=2,
        max_moves=8,
        max_steps=3,
        workers=cfg.workers,
    )
    profile_check = {
        "m": pm,
        "r": pr,
        "delta": pdelta,
        "profile": _profile_summary(profile),
        "analytic_v": pm * pdelta * pdelta,
        "analytic_B": pdelta,
        "consistent": profile.v_delta_minus <= pm * pdelta * pdelta * (1 + 1e-9)
        and profile.B_delta <= pdelta * (1 + 1e-9),
    }
    meta = {
        "function": kind,
        "m": m,
        "r": r,
        "statistics": stats,
        "reference_constants": {
            "zeta2": ZETA2,
            "zeta3": ZETA3,
            "sum_inverse_squares": inverse_square_sum(m),
            "assignment_variance_asymptotic": 4.0 * (ZETA2 - ZETA3) / m,
        },
        "raw_quantiles": raw_series.a,
        "raw_one_step_gaps": one,
        "raw_two_step_gaps": two,
        "two_step_note": "the displayed two-step inequality has an unspecified constant; reported, not asserted",
        "truncation": sub_reports,
        "c_per_k": cs if cfg.adaptive_c else None,
        "profile_check": profile_check,
    }
    return rows, meta


def _rademacher_experiment(cfg):
    n = cfg.n if cfg.n is not None else 50
    if not cfg.family.startswith("random"):
        raise ArgumentError(f"unknown family {cfg.family!r}; use randomN")
    size = int(cfg.family[len("random"):] or 20)
    fam = VectorFamily.random(size, n, np.random.default_rng([cfg.seed, 0xFA]))
    sampler = RademacherSampler(fam.vectors)
    series = mc_quantiles(sampler, cfg.samples, K=cfg.K, beta=cfg.beta, seed=cfg.seed, workers=cfg.workers)
    profile = derivative_profile(
        fam.sup, "sampled", r=2, n=n, samples=cfg.profile_samples, seed=cfg.seed, target="v_plus"
    )
    rows = _rows_for(series, cfg.theorem, v=1.0)
    meta = {
        "function": "rademacher",
        "n": n,
        "family_size": size,
        "profile": _profile_summary(profile),
        "profile_consistent": profile.v_plus <= 1.0 + 1e-9,
        "series": series.to_dict(),
    }
    return rows, meta


def _eigen_experiment(cfg):
    m = cfg.m if cfg.m is not None else 10
    series = mc_quantiles(EigenSampler(m), cfg.samples, K=cfg.K, beta=cfg.beta, seed=cfg.seed, workers=cfg.workers)
    n = m * (m - 1) // 2
    profile = derivative_profile(
        EigenEvaluator(m), "sampled", r=2, n=n, samples=cfg.profile_samples, seed=cfg.seed, target="v_plus"
    )
    rows = _rows_for(series, cfg.theorem, v=4.0)
    meta = {
        "function": "eigen",
        "m": m,
        "profile": _profile_summary(profile),
        "profile_consistent": profile.v_plus <= 4.0 + 1e-9,
        "series": series.to_dict(),
    }
    return rows, meta


def _lis_experiment(cfg):
    n = cfg.n if cfg.n is not None else 12
    r = cfg.r if cfg.r is not None else 2
    K = cfg.K if cfg.K is not None else n
    try:
        check_capacity(r, n)
        f = TabulatedFunction(r, n, LisEvaluator()(cube_points(r, n)))
    except Exception:
        f = None
    if f is not None:
        series = exact_quantiles(f, K)
        profile = exact_profile(f)
    else:
        series = mc_quantiles(LisSampler(n, r), cfg.samples, K=cfg.K, beta=cfg.beta, seed=cfg.seed, workers=cfg.workers)
        profile = derivative_profile(
            LisEvaluator(), "sampled", r=r, n=n, samples=cfg.profile_samples, seed=cfg.seed,
            target="v_delta_minus" if r > 2 else "v_plus",
        )
    if r == 2:
        rep = gap_report(series, profile, cfg.theorem or "thm31", phi=PhiSpec.identity())
    else:
        rep = gap_report(series, profile, "cor41", r=r)
    meta = {"function": "lis", "n": n, "alphabet": r, "profile": _profile_summary(profile), "series": series.to_dict()}
    return rep.rows, meta


def _convex_experiment(cfg):
    n = cfg.n if cfg.n is not None else 8
    check_capacity(2, n)
    rng = np.random.default_rng([cfg.seed, 0xCD])
    A = PointSet.random(2 ** (n - 1), n, rng)
    f = convex_distance_table(A)
    K = cfg.K if cfg.K is not None else n
    series = exact_quantiles(f, K)
    profile = exact_profile(f)
    rep = gap_report(series, profile, cfg.theorem or "thm22")
    values = np.sort(f.values)
    worst = math.inf
    for t in np.unique(values):
        tail = float(np.mean(f.values >= t))
        worst = min(worst, 2.0 * math.exp(-t * t / 4.0) - tail)
    meta = {
        "function": "convex-distance",
        "n": n,
        "set_size": len(A),
        "profile": _profile_summary(profile),
        "tail_bound_min_slack": worst,
        "series": series.to_dict(),
    }
    return rep.rows, meta


_RUNNERS = {
    "mst": _weights_experiment,
    "assignment": _weights_experiment,
    "rademacher": _rademacher_experiment,
    "eigen": _eigen_experiment,
    "lis": _lis_experiment,
    "convex-distance": _convex_experiment,
}


def run_experiment(cfg: ExperimentConfig):
    """Run one experiment and return its :class:`~localtail.quantiles.GapBoundReport`."""
    from .quantiles import GapBoundReport

    rows, meta = _RUNNERS[cfg.kind](cfg)
    meta = dict(meta)
    meta["seed"] = cfg.seed
    meta["N"] = cfg.samples
    meta["params"] = cfg.to_dict()
    return GapBoundReport(rows, meta)
