from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcco.core import (
    CapacityError,
    CostOracle,
    Rule,
    RuleSet,
    brute_force_argmax,
    count_occurrences,
    dumps_problem,
    evaluate,
    evaluate_indices,
    from_index,
    full_vector,
    hamming,
    load_problem,
    optimal_set,
    random_problem,
    save_problem,
    to_index,
)

bits = st.integers(1, 12).flatmap(lambda n: st.text("01", min_size=n, max_size=n))


def test_big_endian_index():
    assert to_index("0001") == 1
    assert to_index("1000") == 8
    assert from_index(5, 4) == "0101"
    assert [from_index(i, 3) for i in range(8)] == sorted(from_index(i, 3) for i in range(8))


def test_overlapping_occurrences():
    assert count_occurrences("0000", "00") == 3
    assert count_occurrences("010101", "0101") == 2
    assert count_occurrences("111", "0") == 0


def test_evaluate_hand_values():
    rs = RuleSet(6, (Rule("01", 1.5), Rule("111", 2.0)))
    assert evaluate(rs, "010101") == pytest.approx(4.5)
    assert evaluate(rs, "011110") == pytest.approx(1.5 + 4.0)
    assert evaluate(rs, "000000") == 0.0


def test_evaluate_matches_full_vector_exhaustively():
    for seed in range(5):
        rs = random_problem(10, rule_lengths=(2, 3, 4), seed=seed)
        vec = full_vector(rs)
        scalar = np.array([evaluate(rs, from_index(i, 10)) for i in range(1 << 10)])
        assert np.array_equal(vec, scalar)  # bit-identical, not just close


def test_merged_duplicates_are_value_preserving():
    dup = RuleSet(8, (Rule("101", 0.7), Rule("0011", 1.1), Rule("101", 0.4)))
    merged = dup.merged()
    assert len(merged.rules) == 2
    np.testing.assert_allclose(full_vector(dup), full_vector(merged), rtol=1e-15)


def test_brute_force_argmax_and_ties():
    rs = RuleSet(4, (Rule("1", 1.0),))
    assert brute_force_argmax(rs).argmax == "1111"
    flat = RuleSet(3, ())
    assert brute_force_argmax(flat).argmax == "000"
    assert optimal_set(RuleSet(3, (Rule("10", 1.0),))) == ["010", "100", "101", "110"]


def test_brute_force_dominates_random_points():
    rs = random_problem(12, seed=3)
    best = brute_force_argmax(rs)
    rng = np.random.default_rng(0)
    for i in rng.integers(0, 1 << 12, 1000):
        assert evaluate(rs, from_index(int(i), 12)) <= best.value


def test_random_problem_contract():
    rs = random_problem(12, (4, 5, 6), (1, 5), (0.5, 2.0), seed=7)
    assert 3 <= len(rs.rules) <= 15
    assert all(r.length in (4, 5, 6) for r in rs.rules)
    assert all(0.5 <= r.reward for r in rs.rules)
    assert rs == random_problem(12, (4, 5, 6), (1, 5), (0.5, 2.0), seed=7)
    assert len({r.pattern for r in rs.rules}) == len(rs.rules)
    with pytest.raises(ValueError):
        random_problem(3, (4,))
    with pytest.raises(ValueError):
        random_problem(8, (3,), count_range=(3, 1))


def test_rule_validation():
    with pytest.raises(ValueError):
        Rule("012", 1.0)
    with pytest.raises(ValueError):
        Rule("01", float("nan"))
    with pytest.raises(ValueError):
        RuleSet(3, (Rule("0101", 1.0),))
    with pytest.raises(ValueError):
        evaluate(RuleSet(4, ()), "010")


def test_problem_round_trip_is_byte_identical(tmp_path):
    text = '{\n  "n_bits": 12,\n  "rules": [\n    {\n      "pattern": "0110",\n      "reward": 1.5\n    },\n' \
           '    {\n      "pattern": "10101",\n      "reward": 2\n    }\n  ]\n}\n'
    src = tmp_path / "p.json"
    src.write_text(text)
    rs = load_problem(src)
    assert dumps_problem(rs) == text
    out = tmp_path / "q.json"
    save_problem(rs, out)
    assert json.loads(out.read_text()) == json.loads(text)


def test_bad_reward_in_file(tmp_path):
    src = tmp_path / "p.json"
    src.write_text('{"n_bits": 4, "rules": [{"pattern": "01", "reward": true}]}')
    with pytest.raises(ValueError):
        load_problem(src)


def test_capacity_limit():
    with pytest.raises(CapacityError):
        full_vector(RuleSet(25, ()))


def test_oracle_counts_every_query():
    rs = random_problem(8, rule_lengths=(3,), seed=1)
    oracle = CostOracle(rs)
    oracle([1, 2, 3])
    oracle(7)
    assert oracle.calls == 4
    np.testing.assert_array_equal(oracle([5]), evaluate_indices(rs, [5]))


@pytest.mark.parametrize("x, y, d", [("0000", "0000", 0), ("0101", "1010", 4), ("0011", "0010", 1)])
def test_hamming_examples(x, y, d):
    assert hamming(x, y) == d


@settings(max_examples=200)
@given(st.integers(1, 10).flatmap(lambda n: st.tuples(*[st.text("01", min_size=n, max_size=n)] * 3)))
def test_hamming_is_a_metric(triple):
    x, y, z = triple
    assert hamming(x, y) == hamming(y, x)
    assert (hamming(x, y) == 0) == (x == y)
    assert hamming(x, z) <= hamming(x, y) + hamming(y, z)


@settings(max_examples=100)
@given(st.lists(st.tuples(st.text("01", min_size=1, max_size=4), st.floats(-3, 3)), min_size=1, max_size=5),
       st.floats(-3, 3), st.integers(0, 255))
def test_linearity_in_rewards(rules, extra, index):
    rs = RuleSet(8, tuple(Rule(p, w) for p, w in rules))
    p0 = rules[0][0]
    split = RuleSet(8, rs.rules + (Rule(p0, extra),))
    joint = RuleSet(8, (Rule(p0, rules[0][1] + extra),) + rs.rules[1:])
    x = from_index(index, 8)
    assert evaluate(split, x) == pytest.approx(evaluate(joint, x), abs=1e-9)
