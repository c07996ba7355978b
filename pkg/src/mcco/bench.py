"""End-to-end solves and the seeded benchmark harness.

``solve`` runs the sampling, thresholding, sketching and decoding pipeline on
one problem; ``bench`` sweeps methods, sample sizes and trials and writes one
CSV row per run plus a JSON summary next to it.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .annealer import BASELINE_NAME, AnnealConfig, dual_anneal
from .core import CostOracle, RuleSet, evaluate, full_vector, from_index, hamming
from .decoder import extract_maximum, mp_argmax, omp
from .sampler import draw_uniform, quantile_threshold, threshold
from .sketch import SketchSpec, apply_to_sample, parse_kind

CSV_HEADER = [
    "method", "sketch", "n_samples", "trial", "seed", "f_opt", "f_hat",
    "distance", "hamming_dist", "evals", "fallback",
]
METHODS = ("anneal", "random", "quad", "quint", "duplet")
DEFAULT_SPARSITY = 10
DEFAULT_QUANTILE = 0.5


@dataclass(frozen=True)
class BenchResultRow:
    method: str
    sketch: str
    n_samples: int
    trial: int
    seed: int
    f_opt: float
    f_hat: float
    distance: float
    hamming_dist: int
    evals: int
    fallback: str = ""

    def as_csv(self) -> list[str]:
        out = []
        for key in CSV_HEADER:
            value = getattr(self, key)
            out.append(format(value, ".17g") if isinstance(value, float) else str(value))
        return out


@dataclass(frozen=True)
class Reference:
    """Exhaustive optimum of a problem: best value and every maximiser."""

    f_opt: float
    optima: tuple[str, ...]

    @classmethod
    def of(cls, ruleset: RuleSet) -> Reference:
        values = full_vector(ruleset)
        best = values.max()
        optima = tuple(from_index(int(i), ruleset.n_bits) for i in np.flatnonzero(values == best))
        return cls(float(best), optima)

    def hamming_to(self, x: str) -> int:
        return min(hamming(x, o) for o in self.optima)


def stable_seed(*parts) -> int:
    """A 63-bit seed derived from the parts, stable across runs and platforms."""
    digest = hashlib.blake2b(repr(parts).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


def _row(method, sketch, n, trial, seed, ref: Reference, ruleset, x_hat, evals, fallback=""):
    f_hat = evaluate(ruleset, x_hat)
    return BenchResultRow(
        method=method, sketch=sketch, n_samples=n, trial=trial, seed=seed,
        f_opt=ref.f_opt, f_hat=f_hat, distance=ref.f_opt - f_hat,
        hamming_dist=ref.hamming_to(x_hat), evals=evals, fallback=fallback,
    )


def solve(
    problem: RuleSet,
    sketch_kind: str = "quad",
    n: int = 250,
    threshold_q: float | None = DEFAULT_QUANTILE,
    sparsity: int | None = None,
    seed: int = 0,
    *,
    threshold_abs: float | None = None,
    decoder: str = "omp",
    sketch_rows: int | None = None,
    sketch_seed: int = 0,
    trial: int = 0,
    method: str | None = None,
    reference: Reference | None = None,
) -> BenchResultRow:
    """Run the full pipeline once and score it against the exhaustive optimum.

    Exactly ``n`` cost queries are spent, all on the uniform sample. The
    threshold is the ``threshold_q`` quantile of positive sampled values
    unless ``threshold_abs`` is given. ``sparsity`` defaults to the number of
    rules in the problem. If thresholding empties the sample, or the decoder
    returns no atom, the best sampled point is reported instead and the row
    is flagged ``fallback=best_sample``.
    """
    kind = parse_kind(sketch_kind)
    spec = SketchSpec(kind, problem.n_bits, num_rows=sketch_rows, seed=sketch_seed)
    ref = reference or Reference.of(problem)
    oracle = CostOracle(problem)
    sample = draw_uniform(problem, n, seed, oracle=oracle)
    t = threshold_abs if threshold_abs is not None else quantile_threshold(sample, threshold_q or 0.0)
    kept = threshold(sample, t)
    if sparsity is None:
        sparsity = len(problem.rules) or DEFAULT_SPARSITY

    x_hat, fallback = None, ""
    if len(kept):
        y = apply_to_sample(spec, kept)
        if decoder == "mp":
            x_hat = mp_argmax(spec, y)
        elif decoder == "omp":
            estimate = omp(spec, y, sparsity)
            if estimate.atoms:
                x_hat = extract_maximum(estimate)
        else:
            raise ValueError(f"unknown decoder {decoder!r}")
    if x_hat is None:
        x_hat, fallback = sample.best()[0], "best_sample"
    label = method or next((k for k, v in _SKETCH_METHODS.items() if v == kind.value), kind.value)
    return _row(label, kind.value, n, trial, seed, ref, problem, x_hat, oracle.calls, fallback)


_SKETCH_METHODS = {"random": "random", "quad": "quadruplet", "quint": "quintuplet", "duplet": "duplet"}


def anneal_row(problem: RuleSet, n: int, seed: int, trial: int = 0,
               reference: Reference | None = None, **config) -> BenchResultRow:
    ref = reference or Reference.of(problem)
    oracle = CostOracle(problem)
    record = dual_anneal(problem, AnnealConfig(budget=n, seed=seed, **config), oracle=oracle)
    return _row("anneal", BASELINE_NAME, n, trial, seed, ref, problem, record.argmax, oracle.calls)


def run_cell(problem: RuleSet, method: str, n: int, trial: int, master_seed: int,
             options: dict | None = None, reference: Reference | None = None) -> BenchResultRow:
    options = options or {}
    seed = stable_seed(master_seed, method, n, trial)
    if method == "anneal":
        return anneal_row(problem, n, seed, trial, reference, **options.get("anneal", {}))
    if method not in _SKETCH_METHODS:
        raise ValueError(f"unknown method {method!r}")
    return solve(problem, method, n, seed=seed, trial=trial, method=method,
                 reference=reference, **options.get("solve", {}))


def _run_batch(args):
    problem, cells, master_seed, options, reference = args
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return [run_cell(problem, m, n, t, master_seed, options, reference) for m, n, t in cells]


def worker_count() -> int:
    cap = os.environ.get("MCCO_THREADS")
    count = os.cpu_count() or 1
    if cap:
        count = min(count, max(1, int(cap)))
    return count


def run_bench(
    problem: RuleSet,
    methods: Sequence[str],
    sample_sizes: Iterable[int],
    trials: int,
    master_seed: int,
    options: dict | None = None,
    workers: int | None = None,
) -> list[BenchResultRow]:
    """Every (method, n, trial) cell, sorted by that key."""
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {METHODS}")
    reference = Reference.of(problem)
    cells = [(m, n, t) for m in sorted(methods) for n in sorted(sample_sizes) for t in range(trials)]
    workers = workers or worker_count()
    if workers <= 1 or len(cells) < 2 * workers:
        rows = _run_batch((problem, cells, master_seed, options, reference))
    else:
        batches = [cells[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_run_batch, [(problem, b, master_seed, options, reference) for b in batches])
            rows = [r for part in parts for r in part]
    rows.sort(key=lambda r: (r.method, r.n_samples, r.trial))
    return rows


def rows_to_csv(rows: Sequence[BenchResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.as_csv())
    return buf.getvalue()


def read_rows(path: str | Path) -> list[BenchResultRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"{path}: unexpected CSV header {reader.fieldnames}")
        rows = []
        for rec in reader:
            try:
                rows.append(BenchResultRow(
                    method=rec["method"], sketch=rec["sketch"], n_samples=int(rec["n_samples"]),
                    trial=int(rec["trial"]), seed=int(rec["seed"]), f_opt=float(rec["f_opt"]),
                    f_hat=float(rec["f_hat"]), distance=float(rec["distance"]),
                    hamming_dist=int(rec["hamming_dist"]), evals=int(rec["evals"]),
                    fallback=rec["fallback"] or "",
                ))
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}: malformed row {rec}") from exc
    return rows


def summarize(rows: Sequence[BenchResultRow], n_bits: int) -> dict:
    """Mean distance per method and n, plus distance and Hamming histograms.

    Distance buckets are 10 equal-width bins over [0, f_opt]; Hamming
    buckets are the integers 0..N.
    """
    groups: dict[tuple[str, int], list[BenchResultRow]] = {}
    for r in rows:
        groups.setdefault((r.method, r.n_samples), []).append(r)
    out = []
    for (method, n), rs in sorted(groups.items()):
        f_opt = rs[0].f_opt
        edges = np.linspace(0.0, f_opt, 11) if f_opt > 0 else np.linspace(0.0, 1.0, 11)
        dist = np.clip([r.distance for r in rs], edges[0], edges[-1])
        hist, _ = np.histogram(dist, bins=edges)
        ham = np.bincount([r.hamming_dist for r in rs], minlength=n_bits + 1)[: n_bits + 1]
        out.append({
            "method": method,
            "n_samples": n,
            "trials": len(rs),
            "mean_distance": float(np.mean([r.distance for r in rs])),
            "exact_rate": float(np.mean([r.distance == 0 for r in rs])),
            "evals": sorted({r.evals for r in rs}),
            "distance_edges": edges.tolist(),
            "distance_hist": hist.tolist(),
            "hamming_hist": ham.tolist(),
        })
    return {"baseline": BASELINE_NAME, "groups": out}


def bench(
    problem: RuleSet,
    methods: Sequence[str],
    sample_sizes: Iterable[int],
    trials: int,
    master_seed: int,
    out_path: str | Path,
    options: dict | None = None,
    workers: int | None = None,
) -> list[BenchResultRow]:
    """Run the sweep and write ``out_path`` (CSV) and ``<out_path>.summary.json``."""
    out_path = Path(out_path)
    rows = run_bench(problem, methods, sample_sizes, trials, master_seed, options, workers)
    for r in rows:
        if r.evals != r.n_samples:
            raise AssertionError(f"query budget broken: {r}")
    summary = summarize(rows, problem.n_bits)
    summary["random_sketch_rows"] = (options or {}).get("solve", {}).get("sketch_rows") or "quadruplet-matched"
    summary["master_seed"] = master_seed
    try:
        out_path.write_text(rows_to_csv(rows))
        Path(str(out_path) + ".summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write benchmark output to {out_path}: {exc}") from exc
    return rows


def row_dict(row: BenchResultRow) -> dict:
    return asdict(row)
