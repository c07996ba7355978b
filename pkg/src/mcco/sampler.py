"""Uniform sampling of the domain and hard thresholding of sampled values."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BitString, CostOracle, RuleSet, from_index


@dataclass(frozen=True)
class Sample:
    """Sampled (bit string, cost) pairs.

    ``indices`` and ``values`` are parallel arrays. ``pre_threshold_size`` is
    the number of draws made before thresholding and is the normalisation
    used by every sketch, so thresholding only ever removes mass.
    """

    n_bits: int
    indices: np.ndarray
    values: np.ndarray
    pre_threshold_size: int

    def __post_init__(self) -> None:
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if idx.shape != val.shape or idx.ndim != 1:
            raise ValueError("indices and values must be parallel 1-d arrays")
        if idx.shape[0] > self.pre_threshold_size:
            raise ValueError("more pairs than draws")
        idx.flags.writeable = False
        val.flags.writeable = False
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    def __len__(self) -> int:
        return int(self.indices.shape[0])

    @property
    def pairs(self) -> list[tuple[BitString, float]]:
        return [(from_index(int(i), self.n_bits), float(v)) for i, v in zip(self.indices, self.values)]

    def best(self) -> tuple[BitString, float]:
        """Highest-valued pair; ties go to the smallest bit string."""
        if len(self) == 0:
            raise ValueError("empty sample")
        top = self.values.max()
        i = int(self.indices[self.values == top].min())
        return from_index(i, self.n_bits), float(top)


def draw_uniform(
    ruleset: RuleSet,
    n: int,
    seed: int,
    replace: bool = False,
    oracle: CostOracle | None = None,
) -> Sample:
    """Draw ``n`` domain points uniformly and query the cost of each.

    Without replacement by default, so every point is distinct. Exactly ``n``
    cost queries are made through ``oracle`` (one is created if omitted).
    """
    size = 1 << ruleset.n_bits
    if n < 1:
        raise ValueError("n must be positive")
    if not replace and n > size:
        raise ValueError(f"cannot draw {n} distinct points from a domain of {size}")
    rng = np.random.default_rng(seed)
    if replace:
        indices = rng.integers(0, size, size=n, dtype=np.int64)
    elif n == size:
        indices = np.arange(size, dtype=np.int64)
    else:
        indices = _distinct(rng, size, n)
    oracle = oracle or CostOracle(ruleset)
    return Sample(ruleset.n_bits, indices, oracle(indices), n)


def _distinct(rng: np.random.Generator, size: int, n: int) -> np.ndarray:
    # rejection keeps memory at O(n) for large domains
    if n * 4 > size:
        return rng.permutation(size)[:n].astype(np.int64)
    chosen: dict[int, None] = {}
    while len(chosen) < n:
        for i in rng.integers(0, size, size=n - len(chosen)):
            chosen.setdefault(int(i))
    return np.fromiter(chosen, dtype=np.int64, count=n)


def threshold(sample: Sample, t: float) -> Sample:
    """Keep the pairs with value >= t; the draw count is unchanged."""
    keep = sample.values >= t
    return Sample(sample.n_bits, sample.indices[keep], sample.values[keep], sample.pre_threshold_size)


def quantile_threshold(sample: Sample, q: float) -> float:
    """Nearest-rank q-quantile of the strictly positive sample values.

    ``q = 0`` returns 0.0, as does a sample with no positive values.
    """
    if len(sample) == 0:
        raise ValueError("empty sample")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    positive = np.sort(sample.values[sample.values > 0])
    if q == 0.0 or positive.size == 0:
        return 0.0
    rank = max(1, math.ceil(q * positive.size))
    return float(positive[rank - 1])
