"""Sketching maps: generalised moments of sampled cost values.

Structured sketches have one row per (window start, window content) pair:
row ``2^w * i + int(pattern)`` is 1 on every domain point whose bits
``i .. i+w-1`` spell ``pattern``. The random sketch draws each entry from a
counter-based hash of (seed, row, domain index). Neither kind is ever stored
as a dense M x 2^N matrix.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import CapacityError, check_bits, to_index, window_values
from .sampler import Sample


class SketchKind(str, Enum):
    SINGULET = "singulet"
    DUPLET = "duplet"
    QUADRUPLET = "quadruplet"
    QUINTUPLET = "quintuplet"
    RANDOM = "random"

    @property
    def window(self) -> int | None:
        return _WINDOWS.get(self)

    @property
    def structured(self) -> bool:
        return self is not SketchKind.RANDOM


_WINDOWS = {
    SketchKind.SINGULET: 1,
    SketchKind.DUPLET: 2,
    SketchKind.QUADRUPLET: 4,
    SketchKind.QUINTUPLET: 5,
}

# command-line spellings
KIND_ALIASES = {
    "single": SketchKind.SINGULET,
    "duplet": SketchKind.DUPLET,
    "quad": SketchKind.QUADRUPLET,
    "quint": SketchKind.QUINTUPLET,
    "random": SketchKind.RANDOM,
}


def parse_kind(name: str | SketchKind) -> SketchKind:
    if isinstance(name, SketchKind):
        return name
    if name in KIND_ALIASES:
        return KIND_ALIASES[name]
    return SketchKind(name)


@dataclass(frozen=True)
class SketchSpec:
    """A family of sketch rows identified by structure.

    For the random kind ``num_rows`` defaults to the quadruplet row count
    for the same N; ``seed`` only matters for the random kind.
    """

    kind: SketchKind
    n_bits: int
    num_rows: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        kind = parse_kind(self.kind)
        num_rows = self.num_rows
        if kind.structured:
            w = kind.window
            if self.n_bits < w:
                raise ValueError(f"{kind.value} sketch needs n_bits >= {w}")
            expected = (self.n_bits - w + 1) << w
            if num_rows is not None and num_rows != expected:
                raise ValueError(f"{kind.value} sketch at N={self.n_bits} has {expected} rows")
            num_rows = expected
        elif num_rows is None:
            num_rows = (self.n_bits - 3) << 4 if self.n_bits >= 4 else 16
        if num_rows <= 0:
            raise ValueError("a sketch needs at least one row")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "num_rows", int(num_rows))

    @property
    def window(self) -> int | None:
        return self.kind.window

    @property
    def positions(self) -> int:
        """Number of window start positions (structured kinds)."""
        return self.n_bits - self.kind.window + 1


@dataclass(frozen=True)
class SketchVector:
    spec: SketchSpec
    values: np.ndarray
    sample_size: int | None
    empty: bool = False

    def buckets(self) -> np.ndarray:
        """Values reshaped to (positions, 2^w); structured kinds only."""
        if not self.spec.kind.structured:
            raise TypeError("random sketches have no window buckets")
        return self.values.reshape(self.spec.positions, 1 << self.spec.window)


def row_count(spec: SketchSpec) -> int:
    return spec.num_rows


# splitmix64 finaliser constants
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def random_bits(seed: int, rows: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Entries of the random sketch for every (index, row) pair.

    Returns a uint8 array of shape ``(len(indices), len(rows))``.
    """
    rows = np.asarray(rows, dtype=np.uint64)
    indices = np.asarray(indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        base = _mix(np.array([seed], dtype=np.uint64) + _GOLDEN)
        per_row = _mix(base + rows + _GOLDEN)
        h = _mix(per_row[None, :] + (indices[:, None] + np.uint64(1)) * _GOLDEN)
    return (h >> np.uint64(63)).astype(np.uint8)


def _row_parts(spec: SketchSpec, row: int) -> tuple[int, int]:
    if not 0 <= row < spec.num_rows:
        raise IndexError(f"row {row} out of range for {spec}")
    w = spec.window
    return row >> w, row & ((1 << w) - 1)


def row_value(spec: SketchSpec, row: int, x: str) -> int:
    check_bits(x, spec.n_bits)
    if spec.kind.structured:
        start, pattern = _row_parts(spec, row)
        return int(int(x[start : start + spec.window], 2) == pattern)
    if not 0 <= row < spec.num_rows:
        raise IndexError(f"row {row} out of range for {spec}")
    return int(random_bits(spec.seed, np.array([row]), np.array([to_index(x)]))[0, 0])


def structured_rows(spec: SketchSpec, indices: np.ndarray) -> np.ndarray:
    """Row hit by each domain point at each window position, shape (len, positions)."""
    w = spec.window
    offsets = np.arange(spec.positions, dtype=np.int64) << w
    return window_values(indices, spec.n_bits, w) + offsets[None, :]


def _accumulate(spec: SketchSpec, indices: np.ndarray, weights: np.ndarray) -> np.ndarray:
    if spec.kind.structured:
        rows = structured_rows(spec, indices)
        w = np.repeat(weights, spec.positions)
        return np.bincount(rows.ravel(), weights=w, minlength=spec.num_rows)
    out = np.zeros(spec.num_rows)
    all_rows = np.arange(spec.num_rows)
    chunk = max(1, (1 << 22) // spec.num_rows)
    for lo in range(0, indices.shape[0], chunk):
        bits = random_bits(spec.seed, all_rows, indices[lo : lo + chunk])
        out += weights[lo : lo + chunk] @ bits
    return out


def apply_to_sample(spec: SketchSpec, sample: Sample) -> SketchVector:
    """Empirical moments of a (thresholded) sample, divided by the draw count."""
    if sample.n_bits != spec.n_bits:
        raise ValueError("sample and sketch disagree on n_bits")
    if len(sample) == 0:
        warnings.warn("sketching an empty sample gives the zero vector", RuntimeWarning, stacklevel=2)
        return SketchVector(spec, np.zeros(spec.num_rows), sample.pre_threshold_size, empty=True)
    total = _accumulate(spec, sample.indices, sample.values)
    return SketchVector(spec, total / sample.pre_threshold_size, sample.pre_threshold_size)


def apply_to_full(spec: SketchSpec, vec: np.ndarray) -> SketchVector:
    """Exact matrix-vector product of the sketch with a dense 2^N vector."""
    if spec.n_bits > 20:
        raise CapacityError("dense sketch products are limited to N <= 20")
    vec = np.asarray(vec, dtype=np.float64)
    if vec.shape != (1 << spec.n_bits,):
        raise ValueError(f"expected a vector of length {1 << spec.n_bits}")
    indices = np.arange(vec.shape[0], dtype=np.int64)
    return SketchVector(spec, _accumulate(spec, indices, vec), None)


def atom_column(spec: SketchSpec, x: str) -> np.ndarray:
    """Sketch column of a single domain point."""
    return columns(spec, np.array([to_index(check_bits(x, spec.n_bits))]))[0]


def columns(spec: SketchSpec, indices: np.ndarray) -> np.ndarray:
    """Dense columns for a batch of domain points, shape (len(indices), M)."""
    indices = np.asarray(indices, dtype=np.int64)
    if spec.kind.structured:
        out = np.zeros((indices.shape[0], spec.num_rows))
        rows = structured_rows(spec, indices)
        np.put_along_axis(out, rows, 1.0, axis=1)
        return out
    return random_bits(spec.seed, np.arange(spec.num_rows), indices).astype(np.float64)
