import math
import pickle

import numpy as np
import pytest

from localtail.exceptions import ArgumentError
from localtail.experiments import (
    ZETA2,
    ZETA3,
    EigenSampler,
    ExperimentConfig,
    RademacherSampler,
    TruncatedCostEvaluator,
    WeightSampler,
    adaptive_c,
    inverse_square_sum,
    run_experiment,
    truncation_level,
)
from localtail.functions import RandomWeightInstance, assignment_cost, mst_cost


def test_reference_constants():
    assert inverse_square_sum(10) == pytest.approx(1.549768, abs=1e-6)
    assert ZETA3 == pytest.approx(1.2020569, abs=1e-7)
    assert ZETA2 == pytest.approx(1.6449341, abs=1e-7)


def test_adaptive_rule():
    assert adaptive_c(1, 200) == 2.0
    k = 10
    assert adaptive_c(k, 200) == pytest.approx(4 * (k + 2) * math.log(2) / math.log(200))
    assert truncation_level(2.0, 100) == pytest.approx(2 * math.log(100) / 100)


def test_config_validation():
    with pytest.raises(ArgumentError):
        ExperimentConfig("knapsack", seed=1)
    with pytest.raises(ArgumentError):
        ExperimentConfig("mst", seed=None)
    with pytest.raises(ArgumentError):
        ExperimentConfig("mst", seed=1, m=1)
    with pytest.raises(ArgumentError):
        ExperimentConfig("mst", seed=1, r=0)
    cfg = ExperimentConfig("mst", seed=3, m=20, workers=4)
    assert "workers" not in cfg.to_dict()
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


def test_samplers_pickle():
    for sampler in (RademacherSampler(np.eye(3) * 0.5), EigenSampler(4), WeightSampler("mst", 5, "uniform01", [0.3], 25)):
        clone = pickle.loads(pickle.dumps(sampler))
        a = sampler(np.random.default_rng(1), 5)
        b = clone(np.random.default_rng(1), 5)
        assert np.array_equal(a, b)


def test_weight_sampler_columns_agree_with_solvers():
    m, delta, r = 6, 0.4, 36
    sampler = WeightSampler("mst", m, "uniform01", [delta], r)
    out = sampler(np.random.default_rng(8), 20)
    rng = np.random.default_rng(8)
    for row in out:
        w = rng.random(m * (m - 1) // 2)
        assert row[0] == mst_cost(RandomWeightInstance("mst", m, w))
        tilde = np.minimum(np.floor(r * w) / r, delta)
        assert row[1] == mst_cost(RandomWeightInstance("mst", m, tilde))
        assert row[2] == mst_cost(RandomWeightInstance("mst", m, np.minimum(w, delta)))


def test_assignment_sampler_columns():
    m, delta, r = 4, 0.5, 16
    out = WeightSampler("assignment", m, "exponential1", [delta], r)(np.random.default_rng(2), 10)
    rng = np.random.default_rng(2)
    for row in out:
        w = -np.log1p(-rng.random(m * m))
        assert row[0] == assignment_cost(RandomWeightInstance("assignment", m, w))
        tilde = np.minimum(np.floor(r * w) / r, delta)
        assert row[1] == assignment_cost(RandomWeightInstance("assignment", m, tilde))


def test_truncated_evaluator_matches_instance():
    ev = TruncatedCostEvaluator("mst", 5, 0.3, 25)
    X = np.random.default_rng(0).integers(0, 25, (6, 10))
    for x, value in zip(X, ev(X)):
        assert value == mst_cost(RandomWeightInstance("mst", 5, np.minimum(x / 25, 0.3)))


def test_mst_experiment_small():
    rep = run_experiment(ExperimentConfig("mst", seed=2, m=30, samples=4000))
    meta = rep.metadata
    assert meta["function"] == "mst" and meta["r"] == 900
    assert meta["statistics"]["reference_mean"] == ZETA3
    trunc = meta["truncation"][0]
    assert trunc["max_discretization_error"] <= trunc["discretization_error_bound"] + 1e-12
    assert trunc["truncation_failure_bound"] == pytest.approx(min(1.0, 4 * 30 ** -0.5))
    assert meta["profile_check"]["consistent"]
    assert len(meta["raw_two_step_gaps"]) == len(meta["raw_one_step_gaps"]) - 1
    assert not rep.violations and all(row.theorem == "cor41" for row in rep.rows)


def test_assignment_experiment_reference():
    uni = run_experiment(ExperimentConfig("assignment", seed=1, m=5, samples=2000))
    assert uni.metadata["statistics"]["reference_mean"] == ZETA2
    exp = run_experiment(ExperimentConfig("assignment", seed=1, m=5, samples=2000, dist="exponential1"))
    assert exp.metadata["statistics"]["reference_mean"] == pytest.approx(inverse_square_sum(5))
    assert exp.metadata["reference_constants"]["assignment_variance_asymptotic"] == pytest.approx(
        4 * (ZETA2 - ZETA3) / 5
    )


def test_adaptive_experiment_has_sub_report_per_level():
    rep = run_experiment(ExperimentConfig("mst", seed=1, m=20, samples=2000, adaptive_c=True))
    cs = rep.metadata["c_per_k"]
    assert len(cs) == len(rep.rows)
    assert {t["c"] for t in rep.metadata["truncation"]} == set(cs)
    for row in rep.rows:
        assert row.B == pytest.approx(truncation_level(cs[row.k - 1], 20))


@pytest.mark.parametrize("kind, kwargs", [("eigen", dict(m=6, samples=5000)), ("convex-distance", dict(n=6)),
                                          ("lis", dict(n=10)), ("lis", dict(n=6, r=3))])
def test_other_experiments_have_no_violations(kind, kwargs):
    rep = run_experiment(ExperimentConfig(kind, seed=5, **kwargs))
    assert rep.rows and not rep.violations


def test_convex_distance_tail_check():
    rep = run_experiment(ExperimentConfig("convex-distance", seed=0, n=7))
    assert rep.metadata["tail_bound_min_slack"] >= 0
