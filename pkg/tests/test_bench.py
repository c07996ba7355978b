from __future__ import annotations

import json
import warnings

import numpy as np
import pytest

from mcco.bench import (
    CSV_HEADER,
    BenchResultRow,
    Reference,
    bench,
    read_rows,
    rows_to_csv,
    run_bench,
    solve,
    stable_seed,
    summarize,
)
from mcco.core import Rule, RuleSet, evaluate, random_problem


@pytest.fixture(scope="module")
def problem():
    return random_problem(12, seed=7)


def test_solve_row_contract(problem):
    row = solve(problem, "quad", 250, seed=1)
    assert row.distance >= 0
    assert 0 <= row.hamming_dist <= 12
    assert row.evals == 250
    assert row.f_opt - row.f_hat == row.distance
    assert row == solve(problem, "quad", 250, seed=1)


def test_solve_full_information_single_rule():
    rs = RuleSet(8, (Rule("010", 1.0),))
    row = solve(rs, "duplet", 256, threshold_q=0.0, seed=0)
    assert row.distance == 0


def test_solve_fallback_on_empty_threshold(problem):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        row = solve(problem, "quad", 50, threshold_abs=1e9, seed=2)
    assert row.fallback == "best_sample"
    assert row.evals == 50


def test_solve_mp_decoder_and_random_kind(problem):
    for kind in ("random", "duplet", "quint"):
        for decoder in ("omp", "mp"):
            row = solve(problem, kind, 60, decoder=decoder, seed=3)
            assert row.evals == 60 and row.distance >= 0
    with pytest.raises(ValueError):
        solve(problem, "quad", 60, decoder="bp")


def test_hamming_is_to_nearest_optimum():
    rs = RuleSet(3, (Rule("10", 1.0),))
    ref = Reference.of(rs)
    assert ref.optima == ("010", "100", "101", "110")
    assert ref.hamming_to("000") == 1


def test_stable_seed_is_fixed():
    assert stable_seed(0, "quad", 50, 0) == stable_seed(0, "quad", 50, 0)
    assert stable_seed(0, "quad", 50, 0) != stable_seed(0, "quad", 50, 1)
    assert stable_seed(1, "anneal", 250, 3) == 6404422550380698308
    assert 0 <= stable_seed("x") < 2 ** 63


def test_bench_counts_sorting_and_budget(problem, tmp_path):
    out = tmp_path / "b.csv"
    rows = bench(problem, ["quad", "anneal"], [100, 50], 3, 11, out, workers=1)
    assert len(rows) == 2 * 2 * 3
    keys = [(r.method, r.n_samples, r.trial) for r in rows]
    assert keys == sorted(keys)
    assert all(r.evals == r.n_samples for r in rows)
    assert out.read_text().splitlines()[0] == ",".join(CSV_HEADER)
    summary = json.loads((tmp_path / "b.csv.summary.json").read_text())
    assert summary["baseline"] == "metropolis-geometric"
    group = summary["groups"][0]
    assert sum(group["distance_hist"]) == 3 and len(group["distance_edges"]) == 11
    assert len(group["hamming_hist"]) == 13


def test_bench_is_byte_identical_across_workers(problem, tmp_path):
    a = run_bench(problem, ["quad", "anneal"], [50, 80], 4, 5, workers=1)
    b = run_bench(problem, ["quad", "anneal"], [50, 80], 4, 5, workers=3)
    assert rows_to_csv(a) == rows_to_csv(b)


def test_bench_rejects_unknown_method(problem, tmp_path):
    with pytest.raises(ValueError):
        run_bench(problem, ["basis-pursuit"], [50], 1, 0)


def test_bench_unwritable_path(problem, tmp_path):
    with pytest.raises(OSError):
        bench(problem, ["quad"], [50], 1, 0, tmp_path / "missing" / "b.csv", workers=1)


def test_csv_round_trip(problem, tmp_path):
    rows = run_bench(problem, ["quint"], [50], 2, 0, workers=1)
    path = tmp_path / "r.csv"
    path.write_text(rows_to_csv(rows))
    assert read_rows(path) == rows


def test_float_serialisation_is_17_digits():
    row = BenchResultRow("quad", "quadruplet", 50, 0, 1, 0.1, 0.1, 0.0, 0, 50)
    assert row.as_csv()[5] == "0.10000000000000001"


def test_malformed_csv(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_rows(bad)
    bad.write_text(",".join(CSV_HEADER) + "\nquad,quadruplet,x,0,0,1,1,0,0,50,\n")
    with pytest.raises(ValueError):
        read_rows(bad)


def test_summary_histograms():
    rows = [BenchResultRow("quad", "quadruplet", 50, i, 0, 10.0, 10.0 - d, d, h, 50)
            for i, (d, h) in enumerate([(0.0, 0), (10.0, 4), (5.0, 2)])]
    s = summarize(rows, 4)["groups"][0]
    assert s["distance_hist"] == [1, 0, 0, 0, 0, 1, 0, 0, 0, 1]
    assert s["hamming_hist"] == [1, 0, 1, 0, 1]
    assert s["mean_distance"] == pytest.approx(5.0)
    assert s["exact_rate"] == pytest.approx(1 / 3)
