"""Verification suites run by ``localtail verify``.

Each suite draws a seeded corpus, runs its checks and returns a
:class:`SuiteReport` with the number of cases, the smallest slack and the
worst witness.  Slack is ``tolerance - error`` for identities and the
relative margin ``(bound - value) / max(1, |value|)`` for inequalities.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._config import INEQUALITY_SLACK
from .bounds import PhiSpec, variance_upper_bound
from .cube import (
    TabulatedFunction,
    cube_points,
    delta_i,
    fourier_transform,
    hypercontractivity_check,
    inverse_transform,
    naive_fourier_transform,
    variance,
)
from .exceptions import ArgumentError
from .functions.convex import PointSet, convex_distance_table
from .functions.lis import lis_length, lis_log_count
from .functions.oracles import assignment_cost_brute, mst_cost_brute
from .functions.profile import exact_profile, self_bounding_check
from .functions.spectral import largest_eigenvalues
from .functions.weights import RandomWeightInstance, assignment_cost, mst_cost

PARSEVAL_TOL = 1e-9
NAIVE_TOL = 1e-10
NAIVE_MAX_POINTS = 4096


@dataclass
class CheckResult:
    name: str
    passed: bool
    cases: int
    min_slack: float
    max_error: float | None = None
    witness: dict | None = None
    min_ratio: float | None = None


@dataclass
class SuiteReport:
    suite: str
    seed: int
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def min_slack(self):
        return min((c.min_slack for c in self.checks), default=math.inf)

    @property
    def worst(self):
        return min(self.checks, key=lambda c: c.min_slack, default=None)

    def to_dict(self):
        worst = self.worst
        return {
            "suite": self.suite,
            "seed": self.seed,
            "passed": self.passed,
            "checks_run": sum(c.cases for c in self.checks),
            "min_slack": self.min_slack,
            "worst_check": worst.name if worst else None,
            "worst_witness": worst.witness if worst else None,
            "checks": [asdict(c) for c in self.checks],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=float)


class _Tracker:
    """Accumulates the smallest slack of one check and where it occurred."""

    def __init__(self, name):
        self.name = name
        self.cases = 0
        self.slack = math.inf
        self.error = 0.0
        self.witness = None
        self.failed = False
        self.ratio = None

    def error_case(self, error, tol, witness):
        self.cases += 1
        self.error = max(self.error, error)
        self._update(tol - error, witness)
        if not error < tol:
            self.failed = True

    def bound_case(self, bound, value, witness, rel=INEQUALITY_SLACK):
        self.cases += 1
        scale = max(1.0, abs(value))
        self._update((bound - value) / scale, witness)
        if value > 0:
            ratio = bound / value
            self.ratio = ratio if self.ratio is None else min(self.ratio, ratio)
        if value > bound + rel * scale:
            self.failed = True

    def flag_case(self, ok, slack, witness):
        self.cases += 1
        self._update(slack, witness)
        if not ok:
            self.failed = True

    def _update(self, slack, witness):
        if slack < self.slack:
            self.slack = slack
            self.witness = witness

    def result(self, with_error=False):
        return CheckResult(
            self.name,
            not self.failed,
            self.cases,
            self.slack,
            self.error if with_error else None,
            self.witness,
            self.ratio,
        )


def random_table(rng, r, n):
    """A random real table drawn from a mix of shapes (Gaussian, small integers, 0/1, sparse)."""
    size = r**n
    kind = int(rng.integers(0, 4))
    if kind == 0:
        vals = rng.standard_normal(size)
    elif kind == 1:
        vals = rng.integers(0, 4, size).astype(np.float64)
    elif kind == 2:
        vals = (rng.random(size) < rng.random()).astype(np.float64)
    else:
        vals = np.where(rng.random(size) < 0.1, rng.standard_normal(size) * 10, 0.0)
    return TabulatedFunction(r, n, vals)


def _fourier_corpus(seed, count=200):
    rng = np.random.default_rng([seed, 1])
    limits = {2: 8, 3: 7, 5: 5}
    out = []
    for t in range(count):
        r = (2, 3, 5)[t % 3]
        n = int(rng.integers(1, limits[r] + 1))
        out.append(random_table(rng, r, n))
    return out


def _fourier_checks(tables):
    roundtrip = _Tracker("round_trip")
    parseval = _Tracker("parseval")
    naive = _Tracker("factorized_vs_naive")
    decomposition = _Tracker("variance_decomposition")
    for idx, f in enumerate(tables):
        wit = {"table": idx, "r": f.r, "n": f.n}
        spec = fourier_transform(f)
        scale = max(1.0, float(np.max(np.abs(f.values))))
        back = inverse_transform(spec)
        roundtrip.error_case(float(np.max(np.abs(back.values - f.values))) / scale, PARSEVAL_TOL, wit)

        energy = float(np.mean(f.values**2))
        spectral = float(np.sum(np.abs(spec.coeffs) ** 2))
        parseval.error_case(abs(energy - spectral) / max(energy, 1e-300) if energy else spectral, PARSEVAL_TOL, wit)

        if f.r**f.n <= NAIVE_MAX_POINTS:
            ref = naive_fourier_transform(f)
            naive.error_case(float(np.max(np.abs(ref.coeffs - spec.coeffs))) / scale, NAIVE_TOL, wit)

        var = variance(f)
        deg = spec.degrees()
        total = 0.0
        for i in range(1, f.n + 1):
            d_spec = fourier_transform(delta_i(f, i))
            mask = deg > 0
            total += float(np.sum(np.abs(d_spec.coeffs[mask]) ** 2 / deg[mask]))
        decomposition.error_case(abs(var - total) / max(var, 1e-300) if var else total, PARSEVAL_TOL, wit)
    return [roundtrip.result(True), parseval.result(True), naive.result(True), decomposition.result(True)]


def suite_fourier(seed, table=None):
    """Transform identities on a random corpus, or on one supplied table."""
    tables = [table] if table is not None else _fourier_corpus(seed)
    return SuiteReport("fourier", seed, _fourier_checks(tables))


def suite_variance_bounds(seed, r=2, count=None):
    """Efron-Stein and the two logarithmic refinements against the exact variance."""
    if r < 2:
        raise ArgumentError("r must be at least 2")
    rng = np.random.default_rng([seed, 2, r])
    if count is None:
        count = 1000 if r == 2 else 500
    max_n = 8 if r == 2 else 6
    while r**max_n > 2**14 and max_n > 1:
        max_n -= 1
    methods = ["efron_stein", "talagrand_rary"]
    if r == 2:
        methods.insert(1, "talagrand_binary")
    trackers = {m: _Tracker(m) for m in methods}
    for idx in range(count):
        f = random_table(rng, r, int(rng.integers(1, max_n + 1)))
        var = variance(f)
        for m in methods:
            bound = variance_upper_bound(f, m).value
            trackers[m].bound_case(bound, var, {"table": idx, "r": r, "n": f.n, "variance": var, "bound": bound})
    return SuiteReport("variance-bounds", seed, [t.result() for t in trackers.values()])


def suite_hypercontractivity(seed, count=500):
    """Low-degree 4-norm against the ``C_r^k`` 2-norm bound, every degree."""
    rng = np.random.default_rng([seed, 3])
    tracker = _Tracker("low_degree_norms")
    limits = {2: 8, 3: 5, 4: 4, 5: 4}
    for idx in range(count):
        r = (2, 3, 4, 5)[idx % 4]
        f = random_table(rng, r, int(rng.integers(1, limits[r] + 1)))
        for k in range(1, f.n + 1):
            res = hypercontractivity_check(f, k)
            tracker.bound_case(res.rhs, res.lhs, {"table": idx, "r": r, "n": f.n, "k": k, "ratio": res.ratio})
    return SuiteReport("hypercontractivity", seed, [tracker.result()])


def convex_distance_checks(rng):
    profile = _Tracker("convex_distance_profile")
    plan = [(4, 200)] + [(n, 100) for n in range(5, 9)]
    for n, count in plan:
        for t in range(count):
            size = int(rng.integers(1, 2**n + 1))
            A = PointSet.random(size, n, rng)
            prof = exact_profile(convex_distance_table(A))
            profile.bound_case(1.0 + 1e-6, prof.v_plus, {"n": n, "set": t, "size": size, "v_plus": prof.v_plus}, rel=0.0)

    tail = _Tracker("convex_distance_tail")
    for n in range(1, 11):
        for t in range(3 if n < 9 else 1):
            size = int(rng.integers(2 ** (n - 1), 2**n + 1))
            A = PointSet.random(size, n, rng)
            d = convex_distance_table(A).values
            for level in np.unique(d):
                observed = float(np.mean(d >= level - 1e-12))
                allowed = 2.0 * math.exp(-level * level / 4.0)
                tail.bound_case(allowed, observed, {"n": n, "set": t, "size": size, "t": float(level)}, rel=1e-12)
    return [profile.result(), tail.result()]


def eigenvalue_check():
    tracker = _Tracker("eigenvalue_profile_m5")
    m = 5
    n = m * (m - 1) // 2
    f = TabulatedFunction(2, n, largest_eigenvalues(cube_points(2, n), m))
    prof = exact_profile(f)
    tracker.bound_case(4.0 + 1e-6, prof.v_plus, {"m": m, "v_plus": prof.v_plus, "point": prof.witness["v_plus"]}, rel=0.0)
    return [tracker.result()]


def self_bounding_checks(n=12):
    out = []
    pts = cube_points(2, n)
    for name, func in (("lis_length", lis_length), ("lis_log_count", lis_log_count)):
        tracker = _Tracker(f"self_bounding_{name}")
        f = TabulatedFunction(2, n, np.array([func(row) for row in pts.tolist()], dtype=np.float64))
        res = self_bounding_check(f, PhiSpec.identity(), 1.0)
        slack = 1.0 - res.max_increment
        tracker.flag_case(res.holds, slack, {"n": n, "clause": res.clause, "point": res.witness})
        out.append(tracker.result())
    return out


def oracle_checks(rng):
    hung = _Tracker("hungarian_vs_brute")
    for t in range(1000):
        m = int(rng.integers(1, 8))
        w = rng.random(m * m)
        if t % 3 == 0:
            w = np.floor(w * 4) / 4  # force ties
        inst = RandomWeightInstance("assignment", m, w)
        fast, slow = assignment_cost(inst), assignment_cost_brute(inst.matrix)
        hung.flag_case(fast == slow, 0.0 - abs(fast - slow), {"instance": t, "m": m, "fast": fast, "brute": slow})
    kru = _Tracker("kruskal_vs_brute")
    for t in range(500):
        m = int(rng.integers(2, 7))
        w = rng.random(m * (m - 1) // 2)
        if t % 3 == 0:
            w = np.floor(w * 4) / 4
        inst = RandomWeightInstance("mst", m, w)
        fast, slow = mst_cost(inst), mst_cost_brute(inst.weights, m)
        kru.flag_case(fast == slow, 0.0 - abs(fast - slow), {"instance": t, "m": m, "fast": fast, "brute": slow})
    return [hung.result(), kru.result()]


def suite_examples(seed):
    """Profiles, self-bounding and solver-oracle checks of the example functions."""
    rng = np.random.default_rng([seed, 4])
    checks = convex_distance_checks(rng) + eigenvalue_check() + self_bounding_checks() + oracle_checks(rng)
    return SuiteReport("examples", seed, checks)


SUITES = {
    "fourier": suite_fourier,
    "variance-bounds": suite_variance_bounds,
    "hypercontractivity": suite_hypercontractivity,
    "examples": suite_examples,
}
