"""Optimisation of rule-compressible cost functions from sampled moments."""

from __future__ import annotations

from .annealer import AnnealConfig, dual_anneal
from .core import (
    CapacityError,
    CostOracle,
    OptimumRecord,
    Rule,
    RuleSet,
    brute_force_argmax,
    evaluate,
    full_vector,
    load_problem,
    optimal_set,
    random_problem,
    save_problem,
)
from .decoder import SparseEstimate, dp_argmax_windowed, extract_maximum, mp_argmax, omp
from .sampler import Sample, draw_uniform, quantile_threshold, threshold
from .sketch import SketchKind, SketchSpec, SketchVector, apply_to_full, apply_to_sample
from .transform import f_transform, f_transform_recursive

__version__ = "0.1.0"

__all__ = [
    "AnnealConfig", "CapacityError", "CostOracle", "OptimumRecord", "Rule", "RuleSet",
    "Sample", "SketchKind", "SketchSpec", "SketchVector", "SparseEstimate",
    "apply_to_full", "apply_to_sample", "brute_force_argmax", "draw_uniform",
    "dp_argmax_windowed", "dual_anneal", "evaluate", "extract_maximum",
    "f_transform", "f_transform_recursive", "full_vector", "load_problem",
    "mp_argmax", "omp", "optimal_set", "quantile_threshold", "random_problem",
    "save_problem", "threshold",
]
