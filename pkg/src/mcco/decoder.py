"""Greedy sparse recovery over the implicit dictionary of domain-point atoms.

Every bit string ``x`` is an atom whose column is its sketch column. The
decoders never build the full M x 2^N dictionary. Correlations with all
atoms are computed by streaming over the domain. For structured (windowed)
sketches they can also be maximised by a chain dynamic programme in
O(N 2^w).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .core import BitString, CapacityError, from_index, to_index
from .sketch import SketchSpec, SketchVector, atom_column, columns, random_bits

__all__ = [
    "SparseEstimate",
    "atom_column",
    "correlations",
    "dp_argmax_windowed",
    "extract_maximum",
    "mp_argmax",
    "omp",
]

MAX_SCAN_BITS = 20
PIVOT_TOL = 1e-10


class UnsupportedSketch(TypeError):
    """The operation needs contiguous-window rows."""


@dataclass
class SparseEstimate:
    atoms: list[tuple[BitString, float]]
    residual_norm: float
    residual_history: list[float] = field(default_factory=list)
    early_termination: bool = False


def _values(y: SketchVector | np.ndarray) -> np.ndarray:
    return np.asarray(y.values if isinstance(y, SketchVector) else y, dtype=np.float64)


def correlations(spec: SketchSpec, y: SketchVector | np.ndarray) -> np.ndarray:
    """<column(x), y> for every x in the domain, in index order.

    Random-kind columns are l2-normalised; structured columns all have the
    same weight so they are left as is.
    """
    if spec.n_bits > MAX_SCAN_BITS:
        raise CapacityError(f"exhaustive atom scan is limited to N <= {MAX_SCAN_BITS}")
    values = _values(y)
    domain = np.arange(1 << spec.n_bits, dtype=np.int64)
    if spec.kind.structured:
        w = spec.window
        mask = (1 << w) - 1
        buckets = values.reshape(spec.positions, 1 << w)
        scores = np.zeros(domain.shape[0])
        for i in range(spec.positions):
            scores += buckets[i][(domain >> (spec.n_bits - w - i)) & mask]
        return scores
    scores = np.empty(domain.shape[0])
    rows = np.arange(spec.num_rows)
    chunk = max(1, (1 << 22) // spec.num_rows)
    for lo in range(0, domain.shape[0], chunk):
        bits = random_bits(spec.seed, rows, domain[lo : lo + chunk]).astype(np.float64)
        norms = np.sqrt(bits.sum(axis=1))
        raw = bits @ values
        scores[lo : lo + chunk] = np.divide(raw, norms, out=np.zeros_like(raw), where=norms > 0)
    return scores


def mp_argmax(spec: SketchSpec, y: SketchVector | np.ndarray) -> BitString:
    """The first Matching Pursuit selection: the atom most correlated with y.

    Ties go to the lexicographically smallest string.
    """
    if spec.n_bits > MAX_SCAN_BITS and spec.kind.structured:
        return dp_argmax_windowed(spec, y)
    return from_index(int(np.argmax(correlations(spec, y))), spec.n_bits)


def dp_argmax_windowed(spec: SketchSpec, y: SketchVector | np.ndarray) -> BitString:
    """Maximise the sum of window buckets along the string by dynamic programming.

    The state is the last w - 1 bits read. ``best[i][s]`` is the best score
    obtainable from window positions i onwards when bits i .. i+w-2 equal s.
    Reconstruction picks the smallest start state and then bit 0 whenever it
    reaches the optimum, which yields the lexicographically smallest
    maximiser.
    """
    if not spec.kind.structured:
        raise UnsupportedSketch("dynamic programming needs a windowed sketch")
    w = spec.window
    buckets = _values(y).reshape(spec.positions, 1 << w)
    n_states = 1 << (w - 1)
    state_mask = n_states - 1
    positions = spec.positions

    best = np.zeros((positions + 1, n_states))
    for i in range(positions - 1, -1, -1):
        nxt = best[i + 1]
        for s in range(n_states):
            w0 = s << 1
            v0 = buckets[i, w0] + nxt[w0 & state_mask]
            v1 = buckets[i, w0 | 1] + nxt[(w0 | 1) & state_mask]
            best[i, s] = v0 if v0 >= v1 else v1

    state = int(np.argmax(best[0]))
    bits = [format(state, f"0{w - 1}b")] if w > 1 else []
    for i in range(positions):
        w0 = state << 1
        v0 = buckets[i, w0] + best[i + 1, w0 & state_mask]
        bit = 0 if v0 >= best[i, state] else 1
        bits.append(str(bit))
        state = (w0 | bit) & state_mask
    return "".join(bits)


def _dp_extreme(spec: SketchSpec, residual: np.ndarray) -> tuple[int, float]:
    """Atom of largest |correlation| without a domain scan, via two DPs."""
    hi = to_index(dp_argmax_windowed(spec, residual))
    lo = to_index(dp_argmax_windowed(spec, -residual))
    col_hi = columns(spec, np.array([hi]))[0] @ residual
    col_lo = columns(spec, np.array([lo]))[0] @ residual
    if abs(col_lo) > abs(col_hi) or (abs(col_lo) == abs(col_hi) and lo < hi):
        return lo, abs(col_lo)
    return hi, abs(col_hi)


def _select(spec: SketchSpec, residual: np.ndarray, selected: list[int]) -> int | None:
    if spec.kind.structured and np.all(residual >= 0):
        idx = to_index(dp_argmax_windowed(spec, residual))
        if idx not in selected:
            return idx
    elif spec.kind.structured and spec.n_bits > MAX_SCAN_BITS:
        idx, _ = _dp_extreme(spec, residual)
        return None if idx in selected else idx
    scores = np.abs(correlations(spec, residual))
    if selected:
        scores[selected] = -np.inf
    idx = int(np.argmax(scores))
    return None if not np.isfinite(scores[idx]) else idx


def omp(spec: SketchSpec, y: SketchVector | np.ndarray, sparsity: int, tol: float = 1e-12) -> SparseEstimate:
    """Orthogonal Matching Pursuit.

    Each round adds the unselected atom with the largest absolute
    correlation with the residual, then refits all coefficients by least
    squares (Cholesky on the Gram matrix). Stops after ``sparsity`` atoms,
    when the residual norm drops below ``tol``, or when the Gram matrix
    loses rank; in the last case the newest atom is discarded and
    ``early_termination`` is set.
    """
    if sparsity < 1:
        raise ValueError("sparsity must be at least 1")
    target = _values(y)
    residual = target.copy()
    history = [float(np.linalg.norm(residual))]
    selected: list[int] = []
    coef = np.zeros(0)
    early = False

    while len(selected) < sparsity and history[-1] >= tol:
        idx = _select(spec, residual, selected)
        if idx is None:
            break
        trial = selected + [idx]
        A = columns(spec, np.array(trial)).T
        gram = A.T @ A
        try:
            factor = cho_factor(gram, lower=True)
        except LinAlgError:
            early = True
            break
        pivots = np.diag(factor[0]) ** 2
        if np.any(pivots < PIVOT_TOL * np.diag(gram)):
            early = True
            break
        coef = cho_solve(factor, A.T @ target)
        selected = trial
        residual = target - A @ coef
        history.append(float(np.linalg.norm(residual)))

    atoms = [(from_index(i, spec.n_bits), float(c)) for i, c in zip(selected, coef)]
    return SparseEstimate(atoms, history[-1], history, early)


def extract_maximum(estimate: SparseEstimate) -> BitString:
    """Atom with the largest coefficient; the earliest selected wins ties."""
    if not estimate.atoms:
        raise ValueError("empty estimate")
    best_x, best_c = estimate.atoms[0]
    for x, c in estimate.atoms[1:]:
        if c > best_c:
            best_x, best_c = x, c
    return best_x
