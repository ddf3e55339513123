"""Seeded single-outcome sampling with Born probabilities.

The baseline a collapse postulate would produce: each run picks one
outcome. Draws come from splitmix64; a 64-bit word ``u`` stands for the
rational ``u / 2**64`` and is classified against the cumulative weights
exactly, by comparing ``u`` with ``ceil(c_j * 2**64)`` in integers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import kernels
from .core import OutcomeDistribution
from .errors import ExpectedCountTooSmall, IndexOutOfRange

TWO64 = 2**64

# upper 5% points of the chi-square distribution, keyed by degrees of freedom
CHI2_CRITICAL_95 = {
    1: 3.841,
    2: 5.991,
    3: 7.815,
    4: 9.488,
    5: 11.070,
    6: 12.592,
    7: 14.067,
    8: 15.507,
    9: 16.919,
}


@dataclass(frozen=True, eq=False)
class SampleRun:
    seed: int
    N: int
    outcomes: np.ndarray  # 1-based outcome indices, read-only

    def __post_init__(self):
        if len(self.outcomes) != self.N:
            raise ValueError("outcome count does not match N")

    def __eq__(self, other):
        if not isinstance(other, SampleRun):
            return NotImplemented
        return self.seed == other.seed and self.N == other.N and np.array_equal(self.outcomes, other.outcomes)

    def counts(self, n: int) -> np.ndarray:
        if self.N and (self.outcomes.min() < 1 or self.outcomes.max() > n):
            raise IndexOutOfRange(f"outcome outside 1..{n}")
        return np.bincount(self.outcomes - 1, minlength=n)


def thresholds(dist: OutcomeDistribution) -> tuple[np.ndarray, int]:
    """Integer cut points for exact classification, plus a 0-based offset.

    Word ``u`` falls in outcome j (0-based) when
    ``ceil(c_{j-1} 2**64) <= u < ceil(c_j 2**64)`` with c the cumulative
    weights. Cut points equal to 0 are always passed and cut points of
    2**64 never are, so both are folded away: leading zeros become the
    offset, and only cut points inside [1, 2**64 - 1] are kept (they fit
    in uint64).
    """
    cuts = []
    acc = Fraction(0)
    for qj in dist.q[:-1]:
        acc += qj
        cuts.append(-((-acc.numerator * TWO64) // acc.denominator))
    offset = sum(1 for t in cuts if t == 0)
    kept = [t for t in cuts if 0 < t < TWO64]
    return np.array(kept, dtype=np.uint64), offset


def sample_runs(dist: OutcomeDistribution, N: int, seed: int) -> SampleRun:
    if N < 1:
        raise ValueError("N must be positive")
    cuts, offset = thresholds(dist)
    words = kernels.splitmix64(seed, N)
    outcomes = kernels.classify(words, cuts, offset) + 1
    outcomes.setflags(write=False)
    return SampleRun(int(seed), N, outcomes)


def empirical_frequencies(run: SampleRun, n: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(c), run.N) for c in run.counts(n))


def _chi_square(counts, dist: OutcomeDistribution, N: int) -> float:
    expected = [N * qj for qj in dist.q]
    if any(e < 5 for e in expected):
        raise ExpectedCountTooSmall(f"expected counts {[str(e) for e in expected]} fall below 5")
    # differences are exact; only the final division goes to float
    return math.fsum(float((int(c) - e) ** 2 / e) for c, e in zip(counts, expected))


def chi_square_statistic(run: SampleRun, dist: OutcomeDistribution) -> float:
    return _chi_square(run.counts(dist.n), dist, run.N)


def chi_square_exceedances(dist: OutcomeDistribution, N: int, seeds: Iterable[int]) -> tuple[int, list[float]]:
    """Chi-square statistic per seed and how many exceed the 95% point."""
    seeds = list(seeds)
    cuts, offset = thresholds(dist)
    table = kernels.sample_counts(seeds, N, cuts, offset, dist.n)
    stats = [_chi_square(row, dist, N) for row in table]
    crit = CHI2_CRITICAL_95[dist.n - 1]
    return sum(s > crit for s in stats), stats
