"""Rule-compressible cost functions over {0,1}^N.

A cost function is described by a handful of rules. Each rule is a short
bit pattern with a reward; every position at which the pattern occurs as a
contiguous substring of the input adds the reward to the total.

Bit strings are plain ``str`` objects made of ``'0'`` and ``'1'``. The
integer index of a string is big-endian: the leftmost character is the most
significant bit, so lexicographic order on strings and numeric order on
indices coincide. Every module in the package uses this convention.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

BitString = str

MAX_DENSE_BITS = 24


class CapacityError(ValueError):
    """Raised when an exhaustive operation would need a 2^N table that is too large."""


def check_bits(x: BitString, length: int | None = None) -> BitString:
    if not x or any(c not in "01" for c in x):
        raise ValueError(f"not a bit string: {x!r}")
    if length is not None and len(x) != length:
        raise ValueError(f"expected a bit string of length {length}, got {len(x)}")
    return x


def to_index(x: BitString) -> int:
    return int(check_bits(x), 2)


def from_index(index: int, n_bits: int) -> BitString:
    if not 0 <= index < (1 << n_bits):
        raise ValueError(f"index {index} out of range for {n_bits} bits")
    return format(index, f"0{n_bits}b")


def _require_dense(n_bits: int, limit: int = MAX_DENSE_BITS) -> None:
    if n_bits > limit:
        raise CapacityError(f"N={n_bits} exceeds the exhaustive limit of {limit} bits")


def window_values(indices: np.ndarray, n_bits: int, width: int) -> np.ndarray:
    """Integer value of every length-``width`` window of each index.

    Returns an array of shape ``(len(indices), n_bits - width + 1)``; column
    ``i`` holds the window that starts at (0-based) position ``i``.
    """
    indices = np.asarray(indices, dtype=np.int64)
    positions = n_bits - width + 1
    mask = (1 << width) - 1
    shifts = np.arange(n_bits - width, -1, -1, dtype=np.int64)[:positions]
    return (indices[:, None] >> shifts[None, :]) & mask


@dataclass(frozen=True)
class Rule:
    pattern: BitString
    reward: float

    def __post_init__(self) -> None:
        check_bits(self.pattern)
        if not np.isfinite(self.reward):
            raise ValueError(f"reward must be finite, got {self.reward}")

    @property
    def length(self) -> int:
        return len(self.pattern)


@dataclass(frozen=True)
class RuleSet:
    """The compressed description of a cost function: N plus a list of rules.

    Duplicate patterns are allowed here and evaluate additively; use
    :meth:`merged` to collapse them.
    """

    n_bits: int
    rules: tuple[Rule, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.n_bits < 1:
            raise ValueError("n_bits must be positive")
        object.__setattr__(self, "rules", tuple(self.rules))
        for rule in self.rules:
            if rule.length > self.n_bits:
                raise ValueError(
                    f"rule {rule.pattern!r} is longer than n_bits={self.n_bits}"
                )

    def merged(self) -> RuleSet:
        totals: dict[str, float] = {}
        for rule in self.rules:
            totals[rule.pattern] = totals.get(rule.pattern, 0.0) + rule.reward
        return RuleSet(self.n_bits, tuple(Rule(p, w) for p, w in totals.items()))

    def to_dict(self) -> dict:
        return {
            "n_bits": self.n_bits,
            "rules": [{"pattern": r.pattern, "reward": r.reward} for r in self.rules],
        }

    @classmethod
    def from_dict(cls, data: dict) -> RuleSet:
        rules = []
        for r in data["rules"]:
            reward = r["reward"]
            if isinstance(reward, bool) or not isinstance(reward, (int, float)):
                raise ValueError(f"reward must be a number, got {reward!r}")
            # keep ints as ints so load -> save reproduces the file
            rules.append(Rule(str(r["pattern"]), reward))
        return cls(int(data["n_bits"]), tuple(rules))


@dataclass(frozen=True)
class OptimumRecord:
    argmax: BitString
    value: float


def load_problem(path: str | Path) -> RuleSet:
    with open(path) as fh:
        return RuleSet.from_dict(json.load(fh))


def dumps_problem(ruleset: RuleSet) -> str:
    return json.dumps(ruleset.to_dict(), indent=2) + "\n"


def save_problem(ruleset: RuleSet, path: str | Path) -> None:
    Path(path).write_text(dumps_problem(ruleset))


def count_occurrences(x: BitString, pattern: BitString) -> int:
    k = len(pattern)
    return sum(1 for i in range(len(x) - k + 1) if x[i : i + k] == pattern)


def evaluate(ruleset: RuleSet, x: BitString) -> float:
    """Cost of ``x``: sum over rules of reward times occurrence count."""
    check_bits(x, ruleset.n_bits)
    total = 0.0
    for rule in ruleset.rules:
        total += rule.reward * count_occurrences(x, rule.pattern)
    return total


def evaluate_indices(ruleset: RuleSet, indices: Sequence[int] | np.ndarray) -> np.ndarray:
    """Vectorised :func:`evaluate` over big-endian indices.

    Uses the same accumulation order as :func:`evaluate`, so results are
    bit-identical to the scalar path.
    """
    indices = np.asarray(indices, dtype=np.int64)
    out = np.zeros(indices.shape[0], dtype=np.float64)
    for rule in ruleset.rules:
        target = int(rule.pattern, 2)
        counts = (window_values(indices, ruleset.n_bits, rule.length) == target).sum(axis=1)
        out += rule.reward * counts
    return out


def full_vector(ruleset: RuleSet) -> np.ndarray:
    """The cost function as a dense vector of length 2^N (big-endian index)."""
    _require_dense(ruleset.n_bits)
    return evaluate_indices(ruleset, np.arange(1 << ruleset.n_bits, dtype=np.int64))


def brute_force_argmax(ruleset: RuleSet) -> OptimumRecord:
    values = full_vector(ruleset)
    # np.argmax returns the first maximiser, i.e. the lexicographically smallest
    best = int(np.argmax(values))
    return OptimumRecord(from_index(best, ruleset.n_bits), float(values[best]))


def optimal_set(ruleset: RuleSet) -> list[BitString]:
    """All maximisers of the cost function, in lexicographic order."""
    values = full_vector(ruleset)
    best = values.max()
    return [from_index(int(i), ruleset.n_bits) for i in np.flatnonzero(values == best)]


def random_problem(
    n_bits: int,
    rule_lengths: Iterable[int] = (4, 5, 6),
    count_range: tuple[int, int] = (1, 5),
    reward_range: tuple[float, float] = (0.5, 2.0),
    seed: int = 0,
) -> RuleSet:
    """Draw a random rule set.

    For each rule length (in increasing order) a count is drawn uniformly
    from the inclusive ``count_range``, then that many patterns are drawn
    uniformly from {0,1}^length with rewards uniform on ``reward_range``.
    Repeated patterns are merged by summing their rewards.
    """
    lengths = sorted(set(rule_lengths))
    lo, hi = count_range
    if not lengths:
        raise ValueError("rule_lengths must be nonempty")
    if lo > hi or lo < 0:
        raise ValueError(f"empty count range {count_range}")
    if max(lengths) > n_bits or min(lengths) < 1:
        raise ValueError(f"rule lengths {lengths} do not fit in n_bits={n_bits}")
    rng = np.random.default_rng(seed)
    rules = []
    for k in lengths:
        for _ in range(int(rng.integers(lo, hi + 1))):
            pattern = from_index(int(rng.integers(0, 1 << k)), k)
            reward = float(rng.uniform(*reward_range))
            rules.append(Rule(pattern, reward))
    return RuleSet(n_bits, tuple(rules)).merged()


def hamming(x: BitString, y: BitString) -> int:
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    return sum(a != b for a, b in zip(x, y))


class CostOracle:
    """Counts every cost-function query; the unit of the query budget."""

    def __init__(self, ruleset: RuleSet):
        self.ruleset = ruleset
        self.calls = 0

    def __call__(self, indices: Sequence[int] | np.ndarray) -> np.ndarray:
        indices = np.atleast_1d(np.asarray(indices, dtype=np.int64))
        self.calls += int(indices.shape[0])
        return evaluate_indices(self.ruleset, indices)
