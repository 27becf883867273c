"""Quantile sequences ``a_k = Q_{1 - 2^-k}`` and their comparison with gap bounds.

Quantiles use the left-continuous convention ``Q_alpha = inf{z : P(f <= z) >= alpha}``;
with ``N`` equally weighted values this is the order statistic of rank
``ceil(N alpha)`` (no interpolation).
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from ._config import INEQUALITY_SLACK, check_capacity
from ._validation import check_int, check_real
from .bounds import (
    PhiSpec,
    gap_bound_adjacent,
    gap_bound_cor41,
    gap_bound_thm22,
    gap_bound_thm23,
    gap_bound_thm31_adjacent,
    local_mass_lower_bound,
    local_mass_threshold,
    monotone_tail_threshold,
)
from .cube import TabulatedFunction
from .exceptions import ArgumentError
from .functions.profile import DerivativeProfile
from .sampling import sample_values

logger = logging.getLogger(__name__)

DEFAULT_BETA = 1e-3
REPORT_COLUMNS = (
    "k",
    "a_k",
    "a_k_lo",
    "a_k_hi",
    "gap",
    "gap_conservative",
    "bound",
    "theorem",
    "v",
    "v_cert",
    "B",
    "slack",
)
THEOREMS = ("thm22", "adjacent", "thm23", "thm31", "cor41")


def _rank_upper(N, k):
    """``ceil(N (1 - 2^-k))`` in exact integer arithmetic."""
    return N - (N >> k)


def _rank(N, level):
    return min(N, max(1, math.ceil(N * level)))


def max_level(N):
    """Deepest level ``floor(log2(N / 8))`` with at least 8 expected exceedances."""
    return max(1, int(math.floor(math.log2(N / 8.0)))) if N >= 16 else 1


def dkw_epsilon(N, beta):
    return math.sqrt(math.log(2.0 / beta) / (2.0 * N))


class EmpiricalQuantiles(BaseEstimator):
    """Upper-tail quantile sequence of a one-dimensional sample.

    Parameters
    ----------
    K : int or None
        Deepest level.  ``None`` uses ``floor(log2(N/8))``; a larger request is
        reduced to that value and the reduction is recorded in ``warnings_``.
    beta : float
        Failure probability of the Dvoretzky-Kiefer-Wolfowitz band.
    bands : bool
        Compute the DKW bands (disable for exact distributions).
    """

    def __init__(self, K=None, beta=DEFAULT_BETA, bands=True):
        self.K = K
        self.beta = beta
        self.bands = bands

    def fit(self, X, y=None):
        X = check_array(X, ensure_2d=False, dtype=np.float64)
        if X.ndim != 1:
            raise ArgumentError("EmpiricalQuantiles expects a one-dimensional sample")
        N = X.shape[0]
        self.warnings_ = []
        K = max_level(N) if self.K is None else check_int(self.K, "K", minimum=1)
        if self.bands and self.K is not None and N < 2 ** (K + 3):
            reduced = max_level(N)
            msg = f"N={N} < 2^(K+3) for K={K}; reducing K to {reduced}"
            logger.warning(msg)
            self.warnings_.append(msg)
            K = reduced
        ordered = np.sort(X, kind="stable")
        self.sorted_ = ordered
        self.n_samples_ = N
        self.levels_ = np.arange(1, K + 1)
        self.quantiles_ = np.array([ordered[_rank_upper(N, k) - 1] for k in self.levels_])
        self.median_ = float(ordered[N - N // 2 - 1])
        self.mean_ = float(np.mean(X))
        if self.bands:
            beta = check_real(self.beta, "beta", minimum=0.0, strict=True)
            eps = dkw_epsilon(N, beta)
            levels = 1.0 - 0.5 ** self.levels_.astype(float)
            self.epsilon_ = eps
            self.lower_ = np.array([ordered[_rank(N, max(0.0, a - eps)) - 1] for a in levels])
            self.upper_ = np.array([ordered[_rank(N, min(1.0, a + eps)) - 1] for a in levels])
            self.median_band_ = (
                float(ordered[_rank(N, max(0.0, 0.5 - eps)) - 1]),
                float(ordered[_rank(N, min(1.0, 0.5 + eps)) - 1]),
            )
        else:
            self.epsilon_ = 0.0
            self.lower_ = self.upper_ = None
            self.median_band_ = None
        return self

    def quantile(self, alpha):
        """``Q_alpha`` of the fitted sample."""
        check_is_fitted(self, "sorted_")
        alpha = check_real(alpha, "alpha")
        if not 0.0 < alpha < 1.0:
            raise ArgumentError("alpha must lie in (0, 1)")
        return float(self.sorted_[_rank(self.n_samples_, alpha) - 1])


@dataclass
class QuantileSeries:
    """``a_k`` for ``k = 1..K`` plus median and mean of ``f(X)``.

    ``lower``/``upper`` are the DKW band values (Monte Carlo only).
    """

    levels: list
    a: list
    median: float
    mean: float
    mode: str = "exact"
    N: int | None = None
    seed: int | None = None
    beta: float | None = None
    epsilon: float | None = None
    lower: list | None = None
    upper: list | None = None
    median_band: tuple | None = None
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if np.any(np.diff(a) < 0):
            raise ArgumentError("quantile sequence must be nondecreasing")
        if a.size and self.median > a[0]:
            raise ArgumentError("median exceeds a_1")
        if self.mode == "exact" and (self.lower is not None or self.upper is not None):
            raise ArgumentError("exact series carry no bands")

    @property
    def K(self):
        return len(self.levels)

    def to_dict(self):
        return {
            key: (list(value) if isinstance(value, (list, tuple, np.ndarray)) else value)
            for key, value in asdict(self).items()
        }

    @classmethod
    def from_estimator(cls, est: EmpiricalQuantiles, mode, seed=None, beta=None):
        return cls(
            levels=[int(k) for k in est.levels_],
            a=[float(v) for v in est.quantiles_],
            median=est.median_,
            mean=est.mean_,
            mode=mode,
            N=est.n_samples_,
            seed=seed,
            beta=beta,
            epsilon=est.epsilon_ if mode == "monte_carlo" else None,
            lower=None if est.lower_ is None else [float(v) for v in est.lower_],
            upper=None if est.upper_ is None else [float(v) for v in est.upper_],
            median_band=est.median_band_,
            warnings=list(est.warnings_),
        )


def exact_quantiles(f: TabulatedFunction, K):
    """Quantiles of ``f(X)`` for ``X`` uniform on the cube (each point mass ``r^-n``)."""
    check_capacity(f.r, f.n)
    K = check_int(K, "K", minimum=1)
    est = EmpiricalQuantiles(K=K, bands=False).fit(f.values)
    return QuantileSeries.from_estimator(est, "exact")


def mc_quantiles(sampler, N, K=None, beta=DEFAULT_BETA, seed=0, workers=1, values=None):
    """Monte Carlo quantile series with DKW confidence bands.

    ``sampler(rng, size)`` returns ``size`` i.i.d. realizations of ``f(X)``.
    Precomputed ``values`` may be passed instead of a sampler.
    """
    if values is None:
        values = sample_values(sampler, N, seed, workers=workers)
    est = EmpiricalQuantiles(K=K, beta=beta).fit(np.asarray(values, dtype=np.float64))
    return QuantileSeries.from_estimator(est, "monte_carlo", seed=seed, beta=beta)


@dataclass
class TailBins:
    origin: int
    masses: list
    tail_sums: list = None

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=float)
        if np.any(masses < 0) or masses.sum() > 1.0 + 1e-12:
            raise ArgumentError("bin masses must be nonnegative with total <= 1")
        suffix = np.concatenate([np.cumsum(masses[::-1])[::-1][1:], [0.0]])
        self.masses = masses.tolist()
        self.tail_sums = suffix.tolist()

    def mass(self, k):
        idx = k - self.origin
        return self.masses[idx] if 0 <= idx < len(self.masses) else 0.0

    def tail_above(self, k):
        """``sum_{i >= k+1} q_i``."""
        idx = k - self.origin
        if idx < 0:
            return float(sum(self.masses[max(0, idx + 1):]))
        return self.tail_sums[idx] if idx < len(self.masses) else 0.0

    @property
    def bins(self):
        return list(range(self.origin, self.origin + len(self.masses)))


def tail_bins(f: TabulatedFunction, lo=None, hi=None):
    """Exact masses ``q_k = P{f(X) in [k, k+1)}`` of an integer-valued table."""
    check_capacity(f.r, f.n)
    vals = f.values
    rounded = np.round(vals)
    if np.max(np.abs(vals - rounded)) > 1e-9:
        raise ArgumentError("tail_bins needs an integer-valued function")
    ints = rounded.astype(np.int64)
    lo = int(ints.min()) if lo is None else int(lo)
    hi = int(ints.max()) if hi is None else int(hi)
    counts = np.bincount(ints - ints.min(), minlength=int(ints.max() - ints.min()) + 1)
    masses = np.zeros(hi - lo + 1)
    for offset, c in enumerate(counts):
        k = int(ints.min()) + offset
        if lo <= k <= hi:
            masses[k - lo] = c / vals.size
    return TailBins(lo, masses.tolist())


@dataclass
class GapRow:
    k: int
    a_k: float
    a_k_lo: float
    a_k_hi: float
    gap: float
    gap_conservative: float
    bound: float
    theorem: str
    v: float
    v_cert: str
    B: float
    slack: float
    median_uncertain: bool = False


@dataclass
class GapBoundReport:
    rows: list
    metadata: dict = field(default_factory=dict)

    @property
    def min_slack(self):
        return min((row.slack for row in self.rows), default=math.inf)

    @property
    def violations(self):
        return [row for row in self.rows if row.slack < -INEQUALITY_SLACK * max(1.0, row.bound)]

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for row in self.rows:
            writer.writerow([_fmt(getattr(row, col)) for col in REPORT_COLUMNS])
        return buf.getvalue()

    def to_dict(self):
        return {"metadata": self.metadata, "rows": [asdict(row) for row in self.rows]}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def gap_report(
    series: QuantileSeries,
    profile: DerivativeProfile | None,
    theorem,
    *,
    phi: PhiSpec | None = None,
    r=None,
    v=None,
    B=None,
    v_cert=None,
    metadata=None,
):
    """Compare adjacent gaps ``a_{k+1} - a_k`` with a theorem's bound.

    Fields consumed per theorem: ``thm22`` and ``adjacent`` use ``v_plus``;
    ``thm23`` uses ``v_minus`` and ``B``; ``thm31`` uses ``phi`` and ``B``;
    ``cor41`` uses ``v_delta_minus`` and ``B_delta``.  Explicit ``v``/``B``
    override the profile (e.g. analytically known constants, tagged by
    ``v_cert``).  Monte Carlo series are compared through the conservative
    gap ``upper(a_{k+1}) - lower(a_k)``.
    """
    if theorem not in THEOREMS:
        raise ArgumentError(f"theorem must be one of {THEOREMS}, got {theorem!r}")
    if profile is not None:
        if theorem != "cor41" and profile.r != 2:
            raise ArgumentError(f"{theorem} needs a binary-cube profile, got r={profile.r}")
        if theorem == "cor41" and r is not None and r != profile.r:
            raise ArgumentError(f"profile has r={profile.r}, report asked for r={r}")
    elif v is None and theorem != "thm31":
        raise ArgumentError("either a profile or an explicit v is required")
    if theorem == "thm31" and phi is None:
        raise ArgumentError("thm31 needs a PhiSpec")
    if theorem == "cor41":
        r = r if r is not None else (profile.r if profile is not None else None)
        if r is None:
            raise ArgumentError("cor41 needs the alphabet size r")

    field_v = {"thm22": "v_plus", "adjacent": "v_plus", "thm23": "v_minus", "thm31": None, "cor41": "v_delta_minus"}[theorem]
    field_B = {"thm22": None, "adjacent": None, "thm23": "B", "thm31": "B", "cor41": "B_delta"}[theorem]
    if v is None and field_v is not None:
        v = getattr(profile, field_v)
    if B is None and field_B is not None:
        if profile is None:
            raise ArgumentError(f"{theorem} needs B from a profile or explicitly")
        B = getattr(profile, field_B)
    B = 0.0 if B is None else float(B)
    if v_cert is None:
        v_cert = profile.certification if profile is not None else "analytic"
        if v_cert == "sampled":
            v_cert = "sampled-lower-bound"

    mc = series.mode == "monte_carlo"
    a = list(series.a)
    lo = list(series.lower) if mc else a
    hi = list(series.upper) if mc else a
    median_hi = series.median_band[1] if mc and series.median_band else series.median
    rows = []
    for idx in range(len(a) - 1):
        k = series.levels[idx]
        gap = a[idx + 1] - a[idx]
        conservative = hi[idx + 1] - lo[idx] if mc else gap
        if theorem == "thm22":
            bound = gap_bound_thm22(0.5**k, 0.5 ** (k + 1), v).value
        elif theorem == "adjacent":
            bound = gap_bound_adjacent(v, k, "simple").value
        elif theorem == "thm23":
            bound = gap_bound_thm23(0.5**k, 0.5 ** (k + 1), v, B).value
        elif theorem == "thm31":
            bound = gap_bound_thm31_adjacent(phi, a[idx + 1], B, k).value
        else:
            bound = gap_bound_cor41(v, B, k, r).value
        rows.append(
            GapRow(
                k=int(k),
                a_k=float(a[idx]),
                a_k_lo=float(lo[idx]),
                a_k_hi=float(hi[idx]),
                gap=float(gap),
                gap_conservative=float(conservative),
                bound=float(bound),
                theorem=theorem,
                v=float("nan") if v is None else float(v),
                v_cert=v_cert,
                B=B,
                slack=float(bound - conservative),
                median_uncertain=bool(mc and lo[idx] <= median_hi),
            )
        )
    meta = {
        "theorem": theorem,
        "mode": series.mode,
        "N": series.N,
        "seed": series.seed,
        "beta": series.beta,
        "K": series.K,
        "phi": phi.to_dict() if phi is not None else None,
        "r": r,
    }
    meta.update(metadata or {})
    return GapBoundReport(rows, meta)


@dataclass
class LocalMassRow:
    k: int
    lhs: float
    rhs: float
    holds: bool


@dataclass
class LocalMassReport:
    rows: list
    threshold: float
    monotone_threshold: float
    monotone_ok: bool

    @property
    def all_hold(self):
        return all(row.holds for row in self.rows)


def local_mass_report(bins: TailBins, mean_f, v):
    """Check the local lower bound on ``q_k / sum_{i>k} q_i + 1`` for each eligible bin.

    Also reports whether ``q_{k+1} <= q_k`` for every bin beyond the
    monotonicity threshold.
    """
    v = check_real(v, "v", minimum=0.0, strict=True)
    threshold = local_mass_threshold(mean_f, v)
    rows = []
    for k in bins.bins:
        tail = bins.tail_above(k)
        if k < threshold or tail <= 0.0:
            continue
        lhs = bins.mass(k) / tail + 1.0
        rhs = local_mass_lower_bound(k, mean_f, v)
        rows.append(LocalMassRow(k, lhs, rhs, lhs >= rhs * (1.0 - INEQUALITY_SLACK)))
    mono = monotone_tail_threshold(mean_f, v)
    monotone_ok = all(bins.mass(k + 1) <= bins.mass(k) for k in bins.bins if k >= mono)
    return LocalMassReport(rows, threshold, mono, monotone_ok)
