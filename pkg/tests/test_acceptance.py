"""Acceptance criteria 1-13, each at its stated scale and tolerance.

Every test prints one ``criterion N PASS|FAIL: ...`` line to the terminal.
"""
import math
import time

import numpy as np
import pytest

from localtail.bounds import PhiSpec, gap_bound_adjacent, gap_bound_cor41, gap_bound_thm22
from localtail.cube import TabulatedFunction, cube_points
from localtail.experiments import ZETA3, ExperimentConfig, inverse_square_sum, run_experiment
from localtail.functions import exact_profile, lis_length
from localtail.quantiles import exact_quantiles, gap_report, max_level
from localtail.verify import (
    convex_distance_checks,
    eigenvalue_check,
    oracle_checks,
    self_bounding_checks,
    suite_fourier,
    suite_hypercontractivity,
    suite_variance_bounds,
)

SEED = 7


@pytest.fixture
def announce(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, f"criterion {number}: {detail}"

    return emit


def _check(report, name):
    return next(c for c in report.checks if c.name == name)


@pytest.fixture(scope="module")
def fourier_report():
    start = time.perf_counter()
    report = suite_fourier(SEED)
    return report, time.perf_counter() - start


ASSIGNMENT = dict(kind="assignment", seed=SEED, m=10, dist="exponential1", samples=100_000)
MST = dict(kind="mst", seed=SEED, m=200, dist="uniform01", samples=20_000)
RADEMACHER = dict(kind="rademacher", seed=SEED, n=50, family="random20", samples=1_000_000, theorem="adjacent")


@pytest.fixture(scope="module")
def single_worker_runs():
    """Criteria 9-11 at one worker, timed; reused by the determinism check."""
    out = {}
    for name, params in (("assignment", ASSIGNMENT), ("mst", MST), ("rademacher", RADEMACHER)):
        start = time.perf_counter()
        report = run_experiment(ExperimentConfig(**params, workers=1))
        out[name] = (report, time.perf_counter() - start)
    return out


def test_criterion_01_fourier_correctness(announce, fourier_report):
    report, seconds = fourier_report
    rt, ps, nv = (_check(report, n) for n in ("round_trip", "parseval", "factorized_vs_naive"))
    ok = rt.cases == 200 and rt.max_error < 1e-9 and ps.max_error < 1e-9 and nv.max_error < 1e-10 and seconds < 30
    announce(
        1,
        ok,
        f"200 tables, round-trip {rt.max_error:.2e}, Parseval {ps.max_error:.2e}, "
        f"naive {nv.max_error:.2e} over {nv.cases} tables, {seconds:.1f}s",
    )


def test_criterion_02_variance_decomposition(announce, fourier_report):
    report, _ = fourier_report
    dec = _check(report, "variance_decomposition")
    announce(2, dec.passed and dec.max_error < 1e-9, f"{dec.cases} tables, max relative error {dec.max_error:.2e}")


def test_criterion_03_variance_inequalities(announce):
    start = time.perf_counter()
    binary = suite_variance_bounds(SEED, r=2, count=1000)
    rary = [suite_variance_bounds(SEED, r=r, count=250) for r in (3, 4)]
    seconds = time.perf_counter() - start
    checks = binary.checks + [c for rep in rary for c in rep.checks]
    failures = [c.name for c in checks if not c.passed]
    cases = sum(c.cases for c in checks)
    ok = not failures and seconds < 120 and binary.checks[0].cases == 1000 and sum(r.checks[0].cases for r in rary) == 500
    ratio = min(c.min_ratio for c in checks)
    announce(3, ok, f"{cases} comparisons, failures {failures}, min bound/variance ratio {ratio:.3f}, {seconds:.1f}s")


def test_criterion_04_hypercontractivity(announce):
    report = suite_hypercontractivity(SEED, count=500)
    check = report.checks[0]
    announce(4, check.passed, f"500 tables, {check.cases} (table, k) pairs, min rhs/lhs ratio {check.min_ratio:.2f}")


def test_criterion_05_convex_distance(announce):
    profile, tail = convex_distance_checks(np.random.default_rng([SEED, 5]))
    ok = profile.passed and tail.passed and profile.cases == 600
    worst = profile.witness or {}
    announce(
        5,
        ok,
        f"{profile.cases} exact profiles, max v_plus {worst.get('v_plus', float('nan')):.12f}; "
        f"{tail.cases} tail levels checked, min slack {tail.min_slack:.3g}",
    )


def test_criterion_06_eigenvalue_profile(announce):
    (check,) = eigenvalue_check()
    announce(6, check.passed, f"m = 5 exhaustive, v_plus {check.witness['v_plus']:.6f} <= 4")


def test_criterion_07_self_bounding(announce):
    start = time.perf_counter()
    checks = self_bounding_checks(12)
    seconds = time.perf_counter() - start
    ok = all(c.passed for c in checks) and seconds < 60
    announce(7, ok, f"lis_length and lis_log_count on 4096 points, {[c.passed for c in checks]}, {seconds:.1f}s")


def test_criterion_08_oracle_equivalence(announce):
    hung, kru = oracle_checks(np.random.default_rng([SEED, 8]))
    ok = hung.passed and kru.passed and hung.cases == 1000 and kru.cases == 500
    announce(8, ok, f"Hungarian {hung.cases} instances exact, Kruskal {kru.cases} instances exact")


def test_criterion_09_assignment_mean(announce, single_worker_runs):
    report, seconds = single_worker_runs["assignment"]
    stats = report.metadata["statistics"]
    target = inverse_square_sum(10)
    z = (stats["mean"] - target) / stats["mean_se"]
    ok = abs(z) <= 3 and abs(target - 1.549768) < 1e-6 and seconds < 60
    announce(9, ok, f"mean {stats['mean']:.6f} vs {target:.6f}, SE {stats['mean_se']:.2e}, z {z:+.2f}, {seconds:.1f}s")


def test_criterion_10_mst_mean(announce, single_worker_runs):
    report, seconds = single_worker_runs["mst"]
    mean = report.metadata["statistics"]["mean"]
    ok = abs(mean - ZETA3) <= 0.05 and seconds < 300
    announce(10, ok, f"mean {mean:.5f} vs zeta(3) {ZETA3:.5f}, |diff| {abs(mean - ZETA3):.4f}, {seconds:.1f}s")


def test_criterion_11_gap_compliance(announce, single_worker_runs):
    report, _ = single_worker_runs["rademacher"]
    N = RADEMACHER["samples"]
    K = max_level(N)
    rows = report.rows
    ks = sorted(row.k for row in rows)
    rad_ok = ks == list(range(1, K)) and all(
        row.gap_conservative <= 4 * math.sqrt(1.0 / row.k) and row.theorem == "adjacent" for row in rows
    )

    dictator = TabulatedFunction(2, 1, [0.0, 1.0])
    d_rep = gap_report(exact_quantiles(dictator, 2), exact_profile(dictator), "thm31", phi=PhiSpec.identity())
    lis = TabulatedFunction(2, 12, [lis_length(p) for p in cube_points(2, 12).tolist()])
    l_rep = gap_report(exact_quantiles(lis, 12), exact_profile(lis), "thm31", phi=PhiSpec.identity())
    exact_ok = not d_rep.violations and not l_rep.violations and l_rep.rows[0].B == 1.0
    announce(
        11,
        rad_ok and exact_ok,
        f"Rademacher N = 1e6: {len(rows)} levels k = 1..{K - 1}, min slack {report.min_slack:.4f}; "
        f"dictator min slack {d_rep.min_slack:.4f}; LIS n = 12 min slack {l_rep.min_slack:.4f}",
    )


def test_criterion_12_formula_regression(announce):
    thm22 = gap_bound_thm22(0.25, 0.125, 1.0).value
    cor41 = gap_bound_cor41(1.0, 0.0, 1, 2).value
    tight = gap_bound_adjacent(1.0, 1, "tight").value
    ok = abs(thm22 - 3.2700) <= 1e-3 and abs(cor41 - 26.502) <= 1e-3 and abs(tight - 3.7947) <= 1e-3
    announce(12, ok, f"thm22 {thm22:.6f}, cor41 {cor41:.6f}, tight adjacent {tight:.6f}")


def test_criterion_13_determinism(announce, single_worker_runs):
    mismatches = []
    for name, params in (("assignment", ASSIGNMENT), ("mst", MST), ("rademacher", RADEMACHER)):
        reference = single_worker_runs[name][0].to_json()
        for workers in (1, 4, 8):
            again = run_experiment(ExperimentConfig(**params, workers=workers)).to_json()
            if again != reference:
                mismatches.append((name, workers))
    announce(13, not mismatches, f"criteria 9-11 rerun at 1, 4 and 8 workers, mismatches {mismatches}")
