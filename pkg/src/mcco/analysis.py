"""Numerical checks of the theory behind the sampling-and-sketching optimiser.

Four groups of results live here:

* the duplet-moment ordering for single three-bit rules,
* Monte-Carlo concentration of sketch moments and the effect of thresholding
  on their variance (including a closed-form exponential model),
* the closeness radius shared by several rule sets,
* counting strings by occurrences of ``001`` and ``00``, each closed form
  paired with a brute-force enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import RuleSet, Rule, full_vector, window_values
from .sketch import SketchKind, SketchSpec, apply_to_full, apply_to_sample
from .sampler import Sample

BRUTE_MAX_BITS = 20
ADMISSIBLE_DRIFT = 0.1


# ---------------------------------------------------------------------------
# duplet-moment ordering for a single three-bit rule


@dataclass(frozen=True)
class PositionReport:
    position: int  # 1-based start of the bit pair
    moments: dict[str, float]
    interior_ok: bool | None  # None at the two boundary positions
    dominating: tuple[str, ...]  # rule substrings that beat every pair


def duplet_dominance_details(rule: str, n_bits: int) -> list[PositionReport]:
    if len(rule) != 3 or any(c not in "01" for c in rule):
        raise ValueError(f"need a three-bit rule, got {rule!r}")
    if not 4 <= n_bits <= 12:
        raise ValueError("n_bits must lie in [4, 12]")
    problem = RuleSet(n_bits, (Rule(rule, 1.0),))
    spec = SketchSpec(SketchKind.DUPLET, n_bits)
    buckets = apply_to_full(spec, full_vector(problem)).buckets()
    subs = {rule[:2], rule[1:]}
    others = [z for z in ("00", "01", "10", "11") if z not in subs]
    reports = []
    for i in range(spec.positions):
        row = {z: float(buckets[i, int(z, 2)]) for z in ("00", "01", "10", "11")}
        top = max(row.values())
        dominating = tuple(sorted(s for s in subs if row[s] >= top))
        interior = 1 <= i <= n_bits - 3  # 1-based 2 <= i+1 <= N-2
        ok = all(row[s] >= row[z] for s in subs for z in others) if interior else None
        reports.append(PositionReport(i + 1, row, ok, dominating))
    return reports


def duplet_dominance_check(rule: str, n_bits: int) -> bool:
    """True iff, at every position, the rule's two-bit substrings carry the
    largest exact duplet moments: at interior positions each substring beats
    every non-substring pair, and at every position some substring beats
    all four pairs."""
    reports = duplet_dominance_details(rule, n_bits)
    return all(r.interior_ok is not False and r.dominating for r in reports)


# ---------------------------------------------------------------------------
# moments, concentration and thresholding


@dataclass(frozen=True)
class MomentStats:
    """Exact per-row mean and population variance of one sketched draw.

    A single uniform draw x contributes ``column(x) * f_t(x)``; ``row_means``
    is its expectation (the sketch of the full thresholded vector over 2^N)
    and ``row_variances`` its variance. ``sample_size`` is the n the stats
    are meant for.
    """

    row_means: np.ndarray
    row_variances: np.ndarray
    sample_size: int
    threshold: float

    def __post_init__(self) -> None:
        if np.any(self.row_variances < 0):
            raise ValueError("variances must be non-negative")

    @property
    def trace(self) -> float:
        return float(self.row_variances.sum())


def thresholded(values: np.ndarray, t: float) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    return np.where(values >= t, values, 0.0)


def moment_stats(ruleset: RuleSet, spec: SketchSpec, n: int, t: float = 0.0) -> MomentStats:
    f = thresholded(full_vector(ruleset), t)
    size = f.shape[0]
    mean = apply_to_full(spec, f).values / size
    second = apply_to_full(spec, f * f).values / size
    # sketch entries are 0/1, so E[(phi f)^2] is the sketch of f^2
    var = np.maximum(second - mean * mean, 0.0)
    return MomentStats(mean, var, n, float(t))


@dataclass(frozen=True)
class ConcentrationResult:
    coverage: float
    bound: float
    trials: int
    epsilon: float
    trace: float

    @property
    def std_error(self) -> float:
        p = min(max(self.bound, 0.0), 1.0)
        return math.sqrt(p * (1 - p) / self.trials)

    @property
    def consistent(self) -> bool:
        return self.coverage >= self.bound - 3 * self.std_error


def chebyshev_bound(trace: float, epsilon: float, n: int) -> float:
    if math.isinf(epsilon):
        return 1.0
    return max(0.0, 1.0 - trace / (epsilon * epsilon * n))


def concentration_experiment(
    ruleset: RuleSet,
    spec: SketchSpec,
    n: int,
    trials: int,
    epsilon: float,
    seed: int,
    t: float = 0.0,
    norm: str = "max",
) -> ConcentrationResult:
    """Empirical probability that the sampled moments land within epsilon
    of the exact ones, against the Chebyshev bound.

    Samples are drawn with replacement. ``norm="max"`` measures the largest
    row deviation; ``norm="l2"`` the Euclidean one. The bound is valid for
    both since the max-norm never exceeds the l2 norm.
    """
    if ruleset.n_bits > 14:
        raise ValueError("exact moments need n_bits <= 14")
    if norm not in ("max", "l2"):
        raise ValueError("norm must be 'max' or 'l2'")
    stats = moment_stats(ruleset, spec, n, t)
    f = thresholded(full_vector(ruleset), t)
    size = f.shape[0]
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(trials):
        idx = rng.integers(0, size, size=n, dtype=np.int64)
        y_hat = apply_to_sample(spec, Sample(ruleset.n_bits, idx, f[idx], n)).values
        dev = y_hat - stats.row_means
        dist = np.abs(dev).max() if norm == "max" else float(np.linalg.norm(dev))
        hits += dist <= epsilon
    return ConcentrationResult(hits / trials, chebyshev_bound(stats.trace, epsilon, n), trials, epsilon, stats.trace)


@dataclass(frozen=True)
class VarianceSplit:
    sigma2: float
    p: float
    mu1: float
    sigma1_2: float

    def __iter__(self):
        return iter((self.sigma2, self.p, self.mu1, self.sigma1_2))

    @property
    def recombined(self) -> float:
        return self.p * self.sigma1_2 + self.mu1 ** 2 * self.p * (1 - self.p)


def variance_decomposition(values: Sequence[float], t: float, rtol: float = 1e-10) -> VarianceSplit:
    """Split the variance of thresholded values into the kept group and the zeroed group.

    The zeroed group has mean and variance 0, so the total variance is
    ``p * sigma1^2 + mu1^2 * p * (1 - p)``. Raises AssertionError when the
    direct computation disagrees beyond ``rtol``.
    """
    x = thresholded(values, t)
    if x.size == 0:
        raise ValueError("values must be nonempty")
    kept = x[np.asarray(values, dtype=np.float64) >= t]
    sigma2 = float(x.var())
    if kept.size == 0:
        return VarianceSplit(0.0, 0.0, 0.0, 0.0)
    split = VarianceSplit(sigma2, kept.size / x.size, float(kept.mean()), float(kept.var()))
    scale = max(abs(sigma2), abs(split.recombined), np.finfo(float).tiny)
    if abs(sigma2 - split.recombined) > rtol * scale:
        raise AssertionError(f"total variance mismatch: {sigma2} vs {split.recombined}")
    return split


def variance_reducing_threshold(values: Sequence[float], grid: Sequence[float] | None = None) -> float | None:
    """Smallest grid threshold that strictly lowers the variance, or None.

    Thresholds that would zero every value are skipped. The default grid is
    the distinct values themselves.
    """
    v = np.asarray(values, dtype=np.float64)
    base = float(v.var())
    grid = np.unique(v) if grid is None else np.sort(np.asarray(grid, dtype=np.float64))
    for t in grid:
        if not np.any(v >= t):
            continue
        if variance_decomposition(v, float(t)).sigma2 < base:
            return float(t)
    return None


@dataclass(frozen=True)
class ExpModelTerms:
    p: float
    mu1: float
    sigma1: float
    variance: float

    @property
    def valid(self) -> bool:
        """The model's p(t) is only a probability when it is at most 1."""
        return 0.0 <= self.p <= 1.0


def exp_model_terms(lam: float, t: float) -> ExpModelTerms:
    """Closed-form terms of the thresholded variance when sorted values
    follow ``lam * exp(-lam * x)``.

    ``sigma1`` is the stated second-moment expression, used as the kept
    group's variance.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if not 0 < t <= lam:
        raise ValueError(f"t must lie in (0, lambda], got {t}")
    L = math.log(t / lam)
    p = -L / lam
    mu1 = 1 / lam - t / lam ** 2 + t * L / lam ** 2
    sigma1 = (lam ** 2 - t ** 2 + 2 * t ** 2 * L - t * (lam + t) * L ** 2) / lam ** 4
    return ExpModelTerms(p, mu1, sigma1, p * sigma1 + mu1 ** 2 * p * (1 - p))


def exp_model_variance(lam: float, t: float) -> float:
    return exp_model_terms(lam, t).variance


def interior_maxima(ys: Sequence[float]) -> list[int]:
    """Indices of strict local maxima that are not at either end."""
    y = np.asarray(ys)
    return [i for i in range(1, len(y) - 1) if y[i] > y[i - 1] and y[i] > y[i + 1]]


# ---------------------------------------------------------------------------
# closeness radius


def closeness_radius(stats_list: Sequence[MomentStats], k: float) -> float:
    """Twice the largest ``k * sigma / sqrt(n)`` over the rule sets, with
    sigma^2 the trace of the per-row variances."""
    if not stats_list:
        raise ValueError("need at least one MomentStats")
    rows = {s.row_variances.shape for s in stats_list}
    if len(rows) != 1:
        raise ValueError("all stats must come from the same sketch")
    return 2 * max(k * math.sqrt(s.trace) / math.sqrt(s.sample_size) for s in stats_list)


def mean_drift(ruleset: RuleSet, spec: SketchSpec, t: float) -> float:
    """Relative l2 change of the exact moments caused by thresholding at t."""
    base = apply_to_full(spec, full_vector(ruleset)).values
    moved = apply_to_full(spec, thresholded(full_vector(ruleset), t)).values
    norm = float(np.linalg.norm(base))
    return float(np.linalg.norm(moved - base)) / norm if norm else 0.0


@dataclass
class ClosenessSweep:
    quantiles: list[float]
    radii: list[float]
    drifts: list[float]
    admissible: list[bool] = field(default_factory=list)

    def admissible_radii(self) -> list[float]:
        return [r for r, ok in zip(self.radii, self.admissible) if ok]

    @property
    def non_increasing(self) -> bool:
        r = self.admissible_radii()
        return all(b <= a * (1 + 1e-12) for a, b in zip(r, r[1:]))


def positive_quantile(values: np.ndarray, q: float) -> float:
    pos = np.sort(values[values > 0])
    if q == 0 or pos.size == 0:
        return 0.0
    return float(pos[max(1, math.ceil(q * pos.size)) - 1])


def closeness_sweep(
    rulesets: Sequence[RuleSet],
    spec: SketchSpec,
    n: int,
    k: float,
    quantiles: Sequence[float],
    drift_limit: float = ADMISSIBLE_DRIFT,
) -> ClosenessSweep:
    """D^(t) over a shared quantile grid; each rule set thresholds at its own
    quantile of positive values. A grid point is admissible when every rule
    set's moments drift by at most ``drift_limit``."""
    sweep = ClosenessSweep(list(quantiles), [], [])
    for q in quantiles:
        stats, drift = [], 0.0
        for rs in rulesets:
            t = positive_quantile(full_vector(rs), q)
            stats.append(moment_stats(rs, spec, n, t))
            drift = max(drift, mean_drift(rs, spec, t))
        sweep.radii.append(closeness_radius(stats, k))
        sweep.drifts.append(drift)
        sweep.admissible.append(drift <= drift_limit)
    return sweep


# ---------------------------------------------------------------------------
# counting strings by occurrences of 001 and 00


def fib(n: int) -> int:
    """Fibonacci numbers with f_1 = f_2 = 1 and f_n = 0 for n <= 0."""
    if n <= 0:
        return 0
    a, b = 0, 1
    for _ in range(n - 1):
        a, b = b, a + b
    return b


def _all_strings(n_bits: int) -> np.ndarray:
    if n_bits > BRUTE_MAX_BITS:
        raise ValueError(f"brute force is limited to N <= {BRUTE_MAX_BITS}")
    return np.arange(1 << n_bits, dtype=np.int64)


def occurrence_counts(pattern: str, n_bits: int) -> np.ndarray:
    """Occurrences (overlapping) of ``pattern`` in every N-bit string."""
    k = len(pattern)
    if n_bits < k:
        return np.zeros(1 << n_bits, dtype=np.int64)
    w = window_values(_all_strings(n_bits), n_bits, k)
    return (w == int(pattern, 2)).sum(axis=1)


def brute_no_00(n_bits: int) -> tuple[int, int]:
    """Strings without ``00``: all of them, and those ending in ``1``."""
    free = occurrence_counts("00", n_bits) == 0
    ends_one = (_all_strings(n_bits) & 1) == 1
    return int(free.sum()), int((free & ends_one).sum())


def count_no_00(n_bits: int) -> tuple[int, int]:
    """(a_N, a*_N) = (f_{N+2}, f_{N+1}); checked by enumeration for N <= 20."""
    a, a_star = fib(n_bits + 2), fib(n_bits + 1)
    if n_bits <= BRUTE_MAX_BITS:
        if (a, a_star) != brute_no_00(n_bits):
            raise AssertionError(f"no-00 count mismatch at N={n_bits}")
    return a, a_star


def count_e(n_bits: int) -> int:
    """Strings of length N containing ``001`` at least once (inclusion-exclusion)."""
    if n_bits < 1:
        raise ValueError("N must be at least 1")
    return sum((-1) ** (k + 1) * math.comb(n_bits - 2 * k, k) * 2 ** (n_bits - 3 * k)
               for k in range(1, n_bits // 3 + 1))


def _s_explicit(n_bits: int) -> int:
    return sum((-1) ** (k + 1) * math.comb(n_bits - 2 * k, k) * k * 2 ** (n_bits - 3 * k)
               for k in range(1, n_bits // 3 + 1))


@lru_cache(maxsize=None)
def _s_recursive(n_bits: int) -> int:
    if n_bits <= 2:
        return 0
    if n_bits == 3:
        return 1
    m = n_bits - 1
    e_prev = count_e(m - 2) if m - 2 >= 1 else 0
    return 2 * _s_recursive(m) - _s_recursive(m - 2) + 2 ** (m - 2) - e_prev


def count_s(n_bits: int, mode: str = "explicit") -> int:
    """Strings of length N containing ``001`` exactly once."""
    if n_bits < 1:
        raise ValueError("N must be at least 1")
    if mode == "explicit":
        return _s_explicit(n_bits)
    if mode == "recursive":
        return _s_recursive(n_bits)
    raise ValueError(f"mode must be 'explicit' or 'recursive', got {mode!r}")


def count_z(n_bits: int, L: int) -> int:
    """Strings with exactly one ``001`` and exactly L occurrences of ``00``."""
    if n_bits < 3 or L < 1:
        raise ValueError("need N >= 3 and L >= 1")
    total = 0
    for k in range(1, n_bits - 1):
        total += fib(k - L + 1) * fib(n_bits - k)
        total += sum(fib(k - L + l) * fib(n_bits - l - k - 1) for l in range(2, L + 1))
    return total


def count_z2_special(n_bits: int) -> int:
    """The two-term expression for L = 2."""
    return sum(fib(k - 1) * fib(n_bits - k) + fib(k) * fib(n_bits - k - 3) for k in range(1, n_bits - 1))


def brute_counts(n_bits: int) -> tuple[int, int, dict[int, int]]:
    """(e_N, s_N, {L: z_L}) by enumeration."""
    c001 = occurrence_counts("001", n_bits)
    c00 = occurrence_counts("00", n_bits)
    single = c001 == 1
    z = {int(L): int(c) for L, c in zip(*np.unique(c00[single], return_counts=True))}
    return int((c001 >= 1).sum()), int(single.sum()), z


def p_realize(n_bits: int, exact: bool = False) -> float | Fraction:
    """Probability that a uniformly chosen ``00`` in a uniformly chosen
    single-``001`` string is followed by ``1``."""
    if n_bits < 3:
        raise ValueError("N must be at least 3")
    s = count_s(n_bits)
    p = sum(Fraction(count_z(n_bits, L), L) for L in range(1, n_bits)) / s
    return p if exact else float(p)


def p_realize_brute(n_bits: int) -> Fraction:
    c001 = occurrence_counts("001", n_bits)
    c00 = occurrence_counts("00", n_bits)
    single = np.flatnonzero(c001 == 1)
    total = Fraction(0)
    for L in np.unique(c00[single]):
        total += Fraction(int(np.sum(c00[single] == L)), int(L))
    return total / single.size


@dataclass(frozen=True)
class CountTable:
    N: int
    e: int
    s: int
    z: dict[int, int]
    p_realize: float

    def __post_init__(self) -> None:
        if sum(self.z.values()) != self.s:
            raise ValueError("z does not partition s")
        if not 0.0 <= self.p_realize <= 1.0:
            raise ValueError("p_realize out of range")


def count_table(n_bits: int) -> CountTable:
    z = {L: c for L in range(1, n_bits) if (c := count_z(n_bits, L))}
    return CountTable(n_bits, count_e(n_bits), count_s(n_bits), z, p_realize(n_bits))
