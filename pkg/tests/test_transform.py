from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from mcco.core import CapacityError, Rule, RuleSet, full_vector
from mcco.transform import (
    all_patterns,
    distance_decomposition,
    distance_squared,
    f_transform,
    f_transform_recursive,
    injectivity_check,
    l1_norm_explicit,
    l1_norm_recursive_step,
    l2_lower_bound,
    min_pairwise_distance,
)

# frozen from exhaustive enumeration
MIN_DIST_K3 = [2, 4, 12, 24, 48, 96, 192, 384]
MIN_DIST_K4 = [2, 4, 12, 28, 56, 112, 224, 448]


def test_identity_at_pattern_length():
    v = f_transform("101", 3).values
    assert v.tolist() == [0, 0, 0, 0, 0, 1, 0, 0]


def test_transform_is_the_single_rule_cost():
    for a in ("0", "11", "010", "1001"):
        np.testing.assert_array_equal(f_transform(a, 9).values, full_vector(RuleSet(9, (Rule(a, 1.0),))))


@pytest.mark.parametrize("k", range(1, 6))
def test_recursive_construction_and_norms(k):
    for a in all_patterns(k):
        prev = None
        for l in range(7):
            direct = f_transform(a, k + l)
            assert np.array_equal(direct.values, f_transform_recursive(a, k + l).values)
            assert direct.l1 == l1_norm_explicit(k, l)
            if prev is not None:
                assert direct.l1 == l1_norm_recursive_step(prev, k + l - 1, k)
            prev = direct.l1


def test_l1_examples():
    assert l1_norm_explicit(3, 0) == 1
    assert l1_norm_explicit(3, 1) == 4
    assert l1_norm_explicit(4, 3) == 32


def test_injectivity():
    for k in range(1, 5):
        for n in range(k, 11):
            assert injectivity_check(k, n)
    with pytest.raises(CapacityError):
        injectivity_check(7, 8)


def test_min_pairwise_distances_frozen():
    assert [min_pairwise_distance(3, 3 + l) for l in range(8)] == MIN_DIST_K3
    assert [min_pairwise_distance(4, 4 + l) for l in range(8)] == MIN_DIST_K4


@pytest.mark.parametrize("k, table", [(3, MIN_DIST_K3), (4, MIN_DIST_K4)])
def test_lower_bound_is_dominated(k, table):
    for l, d in enumerate(table):
        assert d >= l2_lower_bound(k, l, exact=True)


def test_lower_bound_values():
    # k=3 simplifies to 2^(l+1) * (0.4333 l - 3.5)
    for l in range(10):
        expected = 2 ** (l + 1) * (Fraction(3, 5) * l - Fraction(1, 9) - (5 + Fraction(l, 3) + Fraction(16, 9)) / 2)
        assert l2_lower_bound(3, l, exact=True) == expected
    assert l2_lower_bound(3, 0) < 0
    assert l2_lower_bound(3, 9) > 0
    with pytest.raises(ValueError):
        l2_lower_bound(2, 1)


def test_lower_bound_fails_for_five_bit_patterns():
    # recorded, not hidden: the bound exceeds the true minimum for k=5
    assert min_pairwise_distance(5, 11) == 240
    assert l2_lower_bound(5, 6) > 240


def test_polarization_always_matches_direct_distance():
    for k in (2, 3):
        for a, b in combinations(all_patterns(k), 2):
            d = distance_decomposition(a, b, k + 3)
            assert d.direct == d.polarization == distance_squared(a, b, k + 3)
            if d.equal_norms:
                assert d.equal_norm_form == d.direct


def test_self_inner_product_depends_on_pattern():
    norms = {a: f_transform(a, 4).sq_norm for a in all_patterns(3)}
    assert set(norms.values()) == {4, 6}
    assert norms["000"] == 6 and norms["001"] == 4


def test_length_mismatch():
    with pytest.raises(ValueError):
        distance_decomposition("01", "011", 5)
    with pytest.raises(ValueError):
        f_transform("0110", 3)
