"""Simulated-annealing baseline on {0,1}^N with an exact evaluation budget.

Chains propose flipping a geometrically distributed number of bits, accept
by the Metropolis rule for maximisation, and cool geometrically. Several
independent restarts share the budget. Every cost evaluation goes through a
:class:`~mcco.core.CostOracle`, so the total number of queries always equals
the configured budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CostOracle, OptimumRecord, RuleSet, from_index

BASELINE_NAME = "metropolis-geometric"
PILOT_EVALS = 16


@dataclass(frozen=True)
class AnnealConfig:
    budget: int
    t_initial: float | None = None
    t_final: float | None = None
    restarts: int = 2
    flip_geometric_p: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.budget < self.restarts:
            raise ValueError("budget must cover one evaluation per restart")
        if not 0.0 < self.flip_geometric_p <= 1.0:
            raise ValueError("flip_geometric_p must lie in (0, 1]")
        if self.t_initial is not None and self.t_initial <= 0:
            raise ValueError("t_initial must be positive")
        if self.t_final is not None:
            if self.t_final <= 0:
                raise ValueError("t_final must be positive")
            if self.t_initial is not None and self.t_final > self.t_initial:
                raise ValueError("t_final must not exceed t_initial")


class _Best:
    """Best-ever point; equal values keep the smaller index."""

    def __init__(self) -> None:
        self.index = -1
        self.value = -math.inf

    def offer(self, index: int, value: float) -> None:
        if value > self.value or (value == self.value and index < self.index):
            self.index, self.value = index, value


def _chain(oracle: CostOracle, n_bits: int, steps: int, t0: float, t1: float,
           p_flip: float, rng: np.random.Generator, best: _Best) -> None:
    x = int(rng.integers(0, 1 << n_bits))
    fx = float(oracle([x])[0])
    best.offer(x, fx)
    proposals = steps - 1
    for k in range(proposals):
        temp = t0 * (t1 / t0) ** (k / proposals) if proposals > 1 else t1
        flips = min(int(rng.geometric(p_flip)), n_bits)
        mask = 0
        for bit in rng.choice(n_bits, size=flips, replace=False):
            mask |= 1 << int(bit)
        y = x ^ mask
        fy = float(oracle([y])[0])
        best.offer(y, fy)
        delta = fy - fx
        if delta >= 0 or rng.random() < math.exp(delta / temp):
            x, fx = y, fy


def dual_anneal(ruleset: RuleSet, config: AnnealConfig, oracle: CostOracle | None = None) -> OptimumRecord:
    """Best point found by annealing within ``config.budget`` evaluations.

    When ``t_initial`` is unset it is the standard deviation of up to 16
    uniformly drawn pilot evaluations, which count against the budget (and
    are candidates for the optimum). ``t_final`` defaults to 1e-3 of the
    initial temperature. The remaining budget is split evenly across chains,
    the first chains taking the remainder.
    """
    oracle = oracle or CostOracle(ruleset)
    n = ruleset.n_bits
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts + 1)
    best = _Best()

    budget = config.budget
    t0 = config.t_initial
    if t0 is None:
        pilot = min(PILOT_EVALS, budget - config.restarts)
        if pilot > 0:
            rng = np.random.default_rng(seeds[0])
            points = rng.integers(0, 1 << n, size=pilot, dtype=np.int64)
            values = oracle(points)
            for i, v in zip(points, values):
                best.offer(int(i), float(v))
            budget -= pilot
            t0 = float(np.std(values))
        if not t0:
            # flat pilot: fall back to unit temperature
            t0 = 1.0
    t1 = config.t_final if config.t_final is not None else 1e-3 * t0
    t1 = min(t1, t0)

    base, extra = divmod(budget, config.restarts)
    for c in range(config.restarts):
        steps = base + (1 if c < extra else 0)
        _chain(oracle, n, steps, t0, t1, config.flip_geometric_p, np.random.default_rng(seeds[c + 1]), best)

    return OptimumRecord(from_index(best.index, n), best.value)
