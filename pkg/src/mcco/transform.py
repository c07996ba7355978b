"""The embedding of a single rule pattern into the 2^N optimisation space.

``f_transform(a, N)[x]`` counts the occurrences of ``a`` in ``x``. The
helpers here compute that vector two ways and evaluate the closed forms that
describe its norms and the separation between transforms of distinct
patterns. All distances are squared Euclidean distances, kept in integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .core import BitString, CapacityError, check_bits, from_index, window_values

MAX_TRANSFORM_BITS = 24


@dataclass(frozen=True)
class TransformVector:
    n_bits: int
    pattern_length: int
    values: np.ndarray

    @property
    def l1(self) -> int:
        return int(self.values.sum())

    @property
    def sq_norm(self) -> int:
        return int((self.values * self.values).sum())


def _check(pattern: BitString, n_bits: int) -> int:
    check_bits(pattern)
    k = len(pattern)
    if n_bits < k:
        raise ValueError(f"n_bits={n_bits} is shorter than the pattern ({k})")
    if n_bits > MAX_TRANSFORM_BITS:
        raise CapacityError(f"n_bits={n_bits} exceeds {MAX_TRANSFORM_BITS}")
    return k


def f_transform(pattern: BitString, n_bits: int) -> TransformVector:
    k = _check(pattern, n_bits)
    domain = np.arange(1 << n_bits, dtype=np.int64)
    counts = (window_values(domain, n_bits, k) == int(pattern, 2)).sum(axis=1)
    return TransformVector(n_bits, k, counts.astype(np.int64))


def f_transform_recursive(pattern: BitString, n_bits: int) -> TransformVector:
    """Build the transform by growing N one bit at a time.

    Start from the indicator of ``pattern`` in {0,1}^k. Going from N to N+1,
    prepend a bit: both halves inherit the N-bit counts, and every (N+1)-bit
    string whose first k bits spell the pattern gains one occurrence.
    """
    k = _check(pattern, n_bits)
    a = int(pattern, 2)
    vec = np.zeros(1 << k, dtype=np.int64)
    vec[a] = 1
    for m in range(k, n_bits):
        vec = np.concatenate([vec, vec])
        block = 1 << (m + 1 - k)
        vec[a * block : (a + 1) * block] += 1
    return TransformVector(n_bits, k, vec)


def l1_norm_explicit(k: int, l: int) -> int:
    """Closed-form l1 norm of the transform of any k-bit pattern into k + l bits."""
    if k < 1 or l < 0:
        raise ValueError("need k >= 1 and l >= 0")
    return (1 << l) * (l + 1)


def l1_norm_recursive_step(previous: int, n_bits: int, k: int) -> int:
    """l1 norm at N + 1 from the norm at N: twice the old norm plus 2^(N-k+1)."""
    return 2 * previous + (1 << (n_bits - k + 1))


@dataclass(frozen=True)
class DistanceDecomposition:
    """Squared distance between two transforms, computed several ways.

    ``direct`` is the entrywise sum of squared differences. ``polarization``
    is ``|Fa|^2 + |Fb|^2 - 2<Fa, Fb>`` and always equals ``direct``.
    ``equal_norm_form`` is ``2(|Fa|^2 - <Fa, Fb>)``, which only matches when
    both patterns have the same self inner product; ``equal_norms`` records
    whether that holds. ``overlap_min`` sums ``min(Fa[x], Fb[x])`` over the
    common support, and ``inner`` is the inner product it is compared against.
    """

    direct: int
    polarization: int
    equal_norm_form: int
    inner: int
    overlap_min: int
    sq_norm_a: int
    sq_norm_b: int

    @property
    def equal_norms(self) -> bool:
        return self.sq_norm_a == self.sq_norm_b


def distance_decomposition(a: BitString, b: BitString, n_bits: int) -> DistanceDecomposition:
    if len(a) != len(b):
        raise ValueError(f"pattern length mismatch: {len(a)} vs {len(b)}")
    fa = f_transform(a, n_bits).values
    fb = f_transform(b, n_bits).values
    diff = fa - fb
    inner = int((fa * fb).sum())
    na, nb = int((fa * fa).sum()), int((fb * fb).sum())
    return DistanceDecomposition(
        direct=int((diff * diff).sum()),
        polarization=na + nb - 2 * inner,
        equal_norm_form=2 * (na - inner),
        inner=inner,
        overlap_min=int(np.minimum(fa, fb).sum()),
        sq_norm_a=na,
        sq_norm_b=nb,
    )


def distance_squared(a: BitString, b: BitString, n_bits: int) -> int:
    return distance_decomposition(a, b, n_bits).direct


def l2_lower_bound(k: int, l: int, exact: bool = False) -> float | Fraction:
    """Closed-form lower bound on the squared distance between transforms of
    two distinct k-bit patterns into k + l bits.

    The bound is negative for small ``l`` and is returned unchanged.
    """
    if k < 3 or l < 0:
        raise ValueError("need k >= 3 and l >= 0")
    if k % 2 == 0:
        tail = Fraction(4, 3) * k + Fraction(2, 3) * l + Fraction(20, 9)
    else:
        tail = Fraction(5, 3) * k + Fraction(1, 3) * l + Fraction(16, 9)
    bound = 2 ** (l + 1) * (Fraction(3, 5) * l - Fraction(1, 9) - tail / 2 ** (k - 2))
    return bound if exact else float(bound)


def all_patterns(k: int) -> list[BitString]:
    return [from_index(i, k) for i in range(1 << k)]


def injectivity_check(k: int, n_bits: int) -> bool:
    if k > 6 or n_bits > 16:
        raise CapacityError("injectivity check is limited to k <= 6, N <= 16")
    if not 1 <= k <= n_bits:
        raise ValueError("need 1 <= k <= n_bits")
    seen = set()
    for a in all_patterns(k):
        key = f_transform(a, n_bits).values.tobytes()
        if key in seen:
            return False
        seen.add(key)
    return True


def min_pairwise_distance(k: int, n_bits: int) -> int:
    """Smallest squared distance between transforms of distinct k-bit patterns."""
    vecs = [f_transform(a, n_bits).values for a in all_patterns(k)]
    return min(int(((u - v) ** 2).sum()) for u, v in combinations(vecs, 2))
