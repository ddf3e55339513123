"""Concentration of branch weight around the Born frequencies.

For fixed N the weight sitting outside a frequency window of half-width
epsilon is computed exactly. It shrinks as N grows but never reaches zero
for finite N when q lies strictly inside the simplex.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .core import (
    BranchClass,
    OutcomeDistribution,
    as_fraction,
    enumerate_classes,
    weight_numerators,
)


@dataclass(frozen=True)
class TypicalityReport:
    N: int
    epsilon: Fraction
    weight_inside: Fraction
    weight_outside: Fraction
    mode_class: BranchClass

    def __post_init__(self):
        assert self.weight_inside + self.weight_outside == 1
        assert 0 <= self.weight_inside <= 1


@dataclass(frozen=True)
class NotReached:
    """min_sample_size found no N up to ``N_max`` meeting the bound."""

    N_max: int
    last_weight_outside: Fraction


def window_bounds(dist: OutcomeDistribution, N: int, epsilon: Fraction) -> list[tuple[int, int]]:
    """Per-outcome inclusive count range with |m/N - q| <= epsilon."""
    out = []
    for qj in dist.q:
        lo = max(0, math.ceil(N * (qj - epsilon)))
        hi = min(N, math.floor(N * (qj + epsilon)))
        out.append((lo, hi))
    return out


def window_mask(counts: np.ndarray, bounds) -> np.ndarray:
    mask = np.ones(counts.shape[0], dtype=bool)
    for j, (lo, hi) in enumerate(bounds):
        mask &= (counts[:, j] >= lo) & (counts[:, j] <= hi)
    return mask


def _check_epsilon(epsilon) -> Fraction:
    epsilon = as_fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return epsilon


def weight_in_window(dist: OutcomeDistribution, N: int, epsilon, cap: int | None = None) -> TypicalityReport:
    epsilon = _check_epsilon(epsilon)
    ens = enumerate_classes(dist.n, N, cap)
    nums = weight_numerators(dist, N)
    mask = window_mask(ens.counts, window_bounds(dist, N, epsilon))
    inside = int(nums[mask].sum()) if mask.any() else 0
    denom = dist.denominator**N
    best = int(np.argmax(nums))  # first maximum wins
    return TypicalityReport(
        N=N,
        epsilon=epsilon,
        weight_inside=Fraction(inside, denom),
        weight_outside=Fraction(denom - inside, denom),
        mode_class=BranchClass(tuple(ens.counts[best].tolist())),
    )


def sharp_max(dist: OutcomeDistribution, N: int, cap: int | None = None) -> BranchClass:
    """Maximum-weight class; ties go to the first class in canonical order."""
    ens = enumerate_classes(dist.n, N, cap)
    best = int(np.argmax(weight_numerators(dist, N)))
    return BranchClass(tuple(ens.counts[best].tolist()))


def min_sample_size(dist: OutcomeDistribution, epsilon, delta, N_max: int, cap: int | None = None):
    """Smallest N <= N_max whose outside-window weight is at most ``delta``.

    Scans upward one N at a time: the outside weight wobbles between
    neighbouring N, so bisection would be wrong.
    """
    epsilon = _check_epsilon(epsilon)
    delta = as_fraction(delta)
    if not 0 < delta < 1:
        raise ValueError("delta must lie strictly between 0 and 1")
    last = None
    for N in range(1, N_max + 1):
        last = weight_in_window(dist, N, epsilon, cap).weight_outside
        if last <= delta:
            return N
    return NotReached(N_max, last)


def _outside(args):
    dist, N, epsilon, cap = args
    return weight_in_window(dist, N, epsilon, cap).weight_outside


def concentration_curve(
    dist: OutcomeDistribution,
    epsilon,
    N_values: Sequence[int],
    cap: int | None = None,
    jobs: int = 1,
) -> list[tuple[int, Fraction]]:
    """Exact outside-window weight for each N. ``jobs > 1`` fans out to processes."""
    epsilon = _check_epsilon(epsilon)
    N_values = list(N_values)
    if any(b < a for a, b in zip(N_values, N_values[1:])):
        raise ValueError("N_values must be ascending")
    tasks = [(dist, N, epsilon, cap) for N in N_values]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(_outside, tasks))  # map keeps input order
    else:
        values = [_outside(t) for t in tasks]
    return list(zip(N_values, values))


def weight_outside_float(dist: OutcomeDistribution, N: int, epsilon, cap: int | None = None) -> float:
    """Approximate outside-window weight through log-space float weights.

    For N too large for big-integer evaluation. The result is a float and
    must be reported as approximate.
    """
    epsilon = _check_epsilon(epsilon)
    ens = enumerate_classes(dist.n, N, cap)
    logw = kernels.log_class_weights(ens.counts, dist.q)
    mask = window_mask(ens.counts, window_bounds(dist, N, epsilon))
    outside = logw[~mask]
    if outside.size == 0:
        return 0.0
    top = outside.max()
    if not np.isfinite(top):
        return 0.0
    return float(math.exp(top) * np.exp(outside - top).sum())
