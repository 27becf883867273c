import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.base import clone

from localtail.bounds import PhiSpec
from localtail.cube import TabulatedFunction, cube_points
from localtail.exceptions import ArgumentError, CapacityError
from localtail.functions import exact_profile, lis_length
from localtail.quantiles import (
    REPORT_COLUMNS,
    EmpiricalQuantiles,
    QuantileSeries,
    TailBins,
    dkw_epsilon,
    exact_quantiles,
    gap_report,
    local_mass_report,
    max_level,
    mc_quantiles,
    tail_bins,
)

from .strategies import tables


class ConstantSampler:
    def __init__(self, c):
        self.c = c

    def __call__(self, rng, size):
        return np.full(size, self.c)


class BitSampler:
    def __call__(self, rng, size):
        return rng.integers(0, 2, size).astype(float)


class TableSampler:
    def __init__(self, values):
        self.values = np.asarray(values)

    def __call__(self, rng, size):
        return self.values[rng.integers(0, self.values.size, size)]


def lis_table(n):
    return TabulatedFunction(2, n, [lis_length(p) for p in cube_points(2, n).tolist()])


# -- quantile conventions ------------------------------------------------------------


def test_exact_constant():
    s = exact_quantiles(TabulatedFunction.constant(2, 3, 4.0), 5)
    assert s.a == [4.0] * 5 and s.median == 4.0 and s.mean == 4.0
    assert s.lower is None and s.upper is None


def test_exact_dictator_and_four_values():
    s = exact_quantiles(TabulatedFunction(2, 1, [0.0, 1.0]), 2)
    assert s.median == 0.0 and s.a == [0.0, 1.0]
    s = exact_quantiles(TabulatedFunction(4, 1, [0.0, 1.0, 2.0, 3.0]), 2)
    assert s.median == 1.0


@given(tables(max_points=256))
def test_exact_quantiles_follow_inf_definition(f):
    K = 6
    s = exact_quantiles(f, K)
    vals = np.sort(f.values)
    for k, a in zip(s.levels, s.a):
        alpha = 1 - 2.0**-k
        # smallest value z with P(f <= z) >= alpha
        ok = [z for z in vals if np.mean(vals <= z) >= alpha]
        assert a == min(ok)
    assert np.all(np.diff(s.a) >= 0) and s.median <= s.a[0]


def test_exact_capacity(monkeypatch):
    monkeypatch.setenv("LOCALTAIL_MAX_POINTS", "8")
    with pytest.raises(CapacityError):
        exact_quantiles(TabulatedFunction(2, 4, np.zeros(16)), 2)


def test_series_invariants():
    with pytest.raises(ArgumentError):
        QuantileSeries([1, 2], [1.0, 0.5], 0.0, 0.0)
    with pytest.raises(ArgumentError):
        QuantileSeries([1], [1.0], 2.0, 0.0)
    with pytest.raises(ArgumentError):
        QuantileSeries([1], [1.0], 0.0, 0.0, lower=[0.0], upper=[2.0])


def test_mc_constant():
    s = mc_quantiles(ConstantSampler(2.5), 5000, seed=1)
    assert set(s.a) == {2.5} and set(s.lower) == {2.5} and set(s.upper) == {2.5}


def test_mc_bits_match_exact_dictator():
    # P(f <= 0) = 1/2 exactly, so the sample a_1 lands on 0 or 1 depending on
    # the seed; the band always spans both and a_2 = 1 is robust
    exact = exact_quantiles(TabulatedFunction(2, 1, [0.0, 1.0]), 2)
    s = mc_quantiles(BitSampler(), 1_000_000, K=2, seed=2)
    assert s.a == exact.a == [0.0, 1.0]
    for seed in range(4):
        s = mc_quantiles(BitSampler(), 1_000_000, K=2, seed=seed)
        assert s.lower[0] == 0.0 and s.upper[0] == 1.0 and s.a[1] == 1.0


def test_level_reduction_warning():
    s = mc_quantiles(BitSampler(), 100, K=10, seed=0)
    assert s.K == 3 and s.warnings
    assert max_level(100) == 3


def test_dkw_epsilon():
    assert dkw_epsilon(10_000, 1e-3) == pytest.approx(math.sqrt(math.log(2000) / 20000))


def test_mc_deterministic_across_workers():
    vals = lis_table(10).values
    one = mc_quantiles(TableSampler(vals), 40_000, seed=9)
    three = mc_quantiles(TableSampler(vals), 40_000, seed=9, workers=3)
    assert one == three


def test_estimator_is_sklearn_compatible():
    est = EmpiricalQuantiles(K=4, beta=0.01)
    assert clone(est).get_params() == {"K": 4, "beta": 0.01, "bands": True}
    est.fit(np.arange(1000.0))
    assert list(est.quantiles_) == [499.0, 749.0, 874.0, 937.0]
    assert est.quantile(0.5) == 499.0
    with pytest.raises(ArgumentError):
        est.fit(np.zeros((3, 3)))


def test_dkw_band_covers_exact_quantiles():
    f = lis_table(10)
    exact = exact_quantiles(f, 6)
    sampler = TableSampler(f.values)
    hits = total = 0
    for seed in range(1000):
        s = mc_quantiles(sampler, 4096, K=6, seed=seed)
        for a, lo, hi in zip(exact.a, s.lower, s.upper):
            total += 1
            hits += lo <= a <= hi
    assert hits / total >= 0.99


# -- tail bins ------------------------------------------------------------------------


def test_tail_bin_examples():
    b = tail_bins(TabulatedFunction.constant(2, 2, 3.0))
    assert b.mass(3) == 1.0 and b.mass(2) == 0.0 and b.mass(4) == 0.0
    b = tail_bins(TabulatedFunction(2, 1, [0.0, 1.0]))
    assert b.mass(0) == b.mass(1) == 0.5
    assert b.tail_above(0) == 0.5 and b.tail_above(1) == 0.0
    with pytest.raises(ArgumentError):
        tail_bins(TabulatedFunction(2, 1, [0.0, 0.5]))


def test_tail_bins_lis():
    b = tail_bins(lis_table(10))
    assert sum(b.masses) == pytest.approx(1.0)
    count_full = sum(1 for p in cube_points(2, 10).tolist() if lis_length(p) == 10)
    assert count_full == 11  # 0^j 1^(10-j)
    assert b.mass(10) == pytest.approx(count_full / 1024)


def test_tail_bins_invariants():
    with pytest.raises(ArgumentError):
        TailBins(0, [0.7, 0.7])
    with pytest.raises(ArgumentError):
        TailBins(0, [-0.1, 0.5])


# -- gap reports ----------------------------------------------------------------------


def test_gap_report_constant():
    s = exact_quantiles(TabulatedFunction.constant(2, 3, 1.0), 4)
    prof = exact_profile(TabulatedFunction.constant(2, 3, 1.0))
    for theorem in ("thm22", "adjacent", "thm23"):
        rep = gap_report(s, prof, theorem, v=1.0)
        assert all(row.gap == 0 and row.slack == row.bound >= 0 for row in rep.rows)
    rep = gap_report(s, prof, "thm31", phi=PhiSpec.identity())
    assert all(row.slack == row.bound for row in rep.rows)


def test_gap_report_dictator_adjacent():
    s = exact_quantiles(TabulatedFunction(2, 1, [0.0, 1.0]), 2)
    rep = gap_report(s, None, "adjacent", v=1.0)
    row = rep.rows[0]
    assert (row.k, row.gap, row.bound, row.slack) == (1, 1.0, 4.0, 3.0)
    assert rep.to_csv().splitlines()[0] == ",".join(REPORT_COLUMNS)


def test_gap_report_uses_conservative_gap_for_mc():
    s = mc_quantiles(TableSampler(lis_table(8).values), 20_000, seed=3)
    rep = gap_report(s, None, "adjacent", v=8.0)
    for i, row in enumerate(rep.rows):
        assert row.gap_conservative == s.upper[i + 1] - s.lower[i]
        assert row.gap_conservative >= row.gap
        assert row.slack == row.bound - row.gap_conservative
    assert [row.k for row in rep.rows] == sorted(row.k for row in rep.rows)


def test_gap_report_profile_mismatch():
    f = TabulatedFunction(3, 2, np.arange(9.0))
    s = exact_quantiles(f, 2)
    with pytest.raises(ArgumentError):
        gap_report(s, exact_profile(f), "thm22")
    with pytest.raises(ArgumentError):
        gap_report(s, exact_profile(f), "cor41", r=4)
    with pytest.raises(ArgumentError):
        gap_report(s, None, "thm22")
    with pytest.raises(ArgumentError):
        gap_report(s, exact_profile(f), "thm99")
    rep = gap_report(s, exact_profile(f), "cor41")
    assert rep.rows[0].v_cert == "exact"


def test_exact_series_satisfy_theorems_lis():
    f = lis_table(12)
    s = exact_quantiles(f, 12)
    prof = exact_profile(f)
    for theorem in ("thm22", "adjacent", "thm23"):
        assert not gap_report(s, prof, theorem).violations
    assert not gap_report(s, prof, "thm31", phi=PhiSpec.identity()).violations
    # a_m <= a_1 + 8 sqrt(v (m - 1))
    for m, a in zip(s.levels, s.a):
        assert a <= s.a[0] + 8 * math.sqrt(prof.v_plus * (m - 1)) + 1e-12


def test_report_json_round_trip():
    s = exact_quantiles(TabulatedFunction(2, 1, [0.0, 1.0]), 2)
    rep = gap_report(s, None, "adjacent", v=1.0, metadata={"function": "dictator"})
    import json

    doc = json.loads(rep.to_json())
    assert doc["metadata"]["function"] == "dictator"
    assert doc["rows"][0]["slack"] == 3.0


# -- local mass ------------------------------------------------------------------------


def test_local_mass_constant_is_empty():
    rep = local_mass_report(tail_bins(TabulatedFunction.constant(2, 2, 0.0)), 0.0, 1.0)
    assert rep.rows == [] and rep.all_hold


def test_local_mass_geometric_bins():
    masses = [2.0 ** -(i + 1) for i in range(30)] + [2.0**-30]
    rep = local_mass_report(TailBins(0, masses), 1.0, 1.0)
    assert rep.rows
    for row in rep.rows[:-1]:
        assert row.lhs == pytest.approx(2.0)


def test_local_mass_lis():
    f = lis_table(12)
    prof = exact_profile(f)
    rep = local_mass_report(tail_bins(f), f.mean(), prof.v_plus)
    assert rep.all_hold
