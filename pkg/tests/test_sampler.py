from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcco.core import CostOracle, Rule, RuleSet, full_vector, random_problem
from mcco.sampler import Sample, draw_uniform, quantile_threshold, threshold


def _sample(values):
    v = np.asarray(values, dtype=float)
    return Sample(8, np.arange(v.size), v, v.size)


def test_full_domain_draw():
    rs = random_problem(8, rule_lengths=(3, 4), seed=2)
    s = draw_uniform(rs, 256, seed=0)
    assert sorted(s.indices.tolist()) == list(range(256))
    np.testing.assert_array_equal(s.values, full_vector(rs)[s.indices])


def test_distinct_and_deterministic():
    rs = random_problem(12, seed=0)
    a = draw_uniform(rs, 250, seed=5)
    b = draw_uniform(rs, 250, seed=5)
    assert len(set(a.indices.tolist())) == 250
    np.testing.assert_array_equal(a.indices, b.indices)
    assert a.pre_threshold_size == 250


def test_query_count_is_exact():
    rs = random_problem(12, seed=0)
    oracle = CostOracle(rs)
    draw_uniform(rs, 123, seed=1, oracle=oracle)
    assert oracle.calls == 123


def test_draw_errors():
    rs = RuleSet(4, ())
    with pytest.raises(ValueError):
        draw_uniform(rs, 17, seed=0)
    with pytest.raises(ValueError):
        draw_uniform(rs, 0, seed=0)
    assert len(draw_uniform(rs, 40, seed=0, replace=True)) == 40


def test_uniform_marginals():
    rs = RuleSet(6, ())
    counts = np.bincount([draw_uniform(rs, 1, seed=s).indices[0] for s in range(10_000)], minlength=64)
    expected = 10_000 / 64
    sd = np.sqrt(10_000 * (1 / 64) * (63 / 64))
    assert np.all(np.abs(counts - expected) <= 5 * sd)


def test_threshold_examples():
    s = _sample([0, 1, 2, 3])
    assert len(threshold(s, 0)) == 4
    assert len(threshold(s, 10)) == 0
    kept = threshold(s, 2)
    assert kept.values.tolist() == [2, 3]
    assert kept.pre_threshold_size == 4


def test_quantile_examples():
    assert quantile_threshold(_sample([1, 2, 3]), 1.0) == 3.0
    assert quantile_threshold(_sample([1, 2, 3, 4]), 0.5) == 2.0
    assert quantile_threshold(_sample([1, 2, 3]), 0.0) == 0.0
    assert quantile_threshold(_sample([0, 0, -1]), 0.5) == 0.0
    with pytest.raises(ValueError):
        quantile_threshold(Sample(3, np.array([], dtype=int), np.array([]), 0), 0.5)


def test_best_prefers_smallest_index():
    s = Sample(4, np.array([9, 3, 5]), np.array([2.0, 2.0, 1.0]), 3)
    assert s.best() == ("0011", 2.0)


def test_samples_are_read_only():
    s = _sample([1, 2])
    with pytest.raises(ValueError):
        s.values[0] = 5


@settings(max_examples=100)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=60), st.floats(-5, 5))
def test_threshold_idempotent(values, t):
    s = _sample(values)
    once = threshold(s, t)
    twice = threshold(once, t)
    np.testing.assert_array_equal(once.values, twice.values)
    assert np.all(once.values >= t)


@settings(max_examples=100)
@given(st.lists(st.floats(0.01, 10), min_size=1, max_size=60))
def test_median_threshold_keeps_half(values):
    s = _sample(values)
    kept = threshold(s, quantile_threshold(s, 0.5))
    assert 2 * len(kept) >= len(values)


def test_threshold_commutes_with_sampling():
    for seed in range(4):
        rs = random_problem(8, rule_lengths=(3, 4), seed=seed)
        f = full_vector(rs)
        t = float(np.median(f))
        full = threshold(draw_uniform(rs, 256, seed=seed), t)
        zeroed = np.where(f >= t, f, 0.0)
        dense = np.zeros(256)
        dense[full.indices] = full.values
        np.testing.assert_array_equal(dense, zeroed)
