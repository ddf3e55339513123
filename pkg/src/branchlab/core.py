"""Outcome distributions and the multinomial branch ensemble.

N repeated runs of an n-outcome measurement produce n**N outcome
sequences. Every quantity studied here depends on a sequence only through
its count vector ``[m_1, ..., m_n]``, so the ensemble is stored as the
C(N+n-1, n-1) count classes in lexicographic ascending order.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterator, Sequence

import numpy as np

from . import kernels
from .errors import (
    CapExceeded,
    DimensionMismatch,
    EmptyDistribution,
    NegativeWeight,
    NotNormalized,
)

DEFAULT_CLASS_CAP = 5_000_000


def class_cap() -> int:
    """Enumeration cap, overridable through ``BRANCHLAB_CLASS_CAP``."""
    raw = os.environ.get("BRANCHLAB_CLASS_CAP")
    return int(raw) if raw else DEFAULT_CLASS_CAP


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction or ``"p/q"`` string. Floats are refused."""
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError as exc:
            raise ValueError(f"not a rational: {x!r}") from exc
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class OutcomeDistribution:
    """Born weights ``q_j = |a(j)|**2`` of an n-outcome measurement."""

    q: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.q) == 0:
            raise EmptyDistribution("distribution has no outcomes")
        if any(x < 0 for x in self.q):
            raise NegativeWeight(f"negative weight in {self.q}")
        total = sum(self.q, Fraction(0))
        if total != 1:
            raise NotNormalized(f"weights sum to {total}, not 1")

    @property
    def n(self) -> int:
        return len(self.q)

    @property
    def denominator(self) -> int:
        """Least common denominator of the weights."""
        return reduce(math.lcm, (x.denominator for x in self.q), 1)

    def numerators(self) -> tuple[int, ...]:
        """Weights rescaled to integers over :attr:`denominator`."""
        d = self.denominator
        return tuple(x.numerator * (d // x.denominator) for x in self.q)

    def __str__(self):
        return "[" + ", ".join(str(x) for x in self.q) + "]"


def validate_distribution(q: Sequence) -> OutcomeDistribution:
    if len(q) == 0:
        raise EmptyDistribution("distribution has no outcomes")
    return OutcomeDistribution(tuple(as_fraction(x) for x in q))


@dataclass(frozen=True, order=True)
class BranchClass:
    """Outcome-count vector of N runs; ordering is lexicographic on counts."""

    counts: tuple[int, ...]

    def __post_init__(self):
        if any((not isinstance(m, (int, np.integer))) or m < 0 for m in self.counts):
            raise ValueError(f"counts must be nonnegative integers: {self.counts}")
        object.__setattr__(self, "counts", tuple(int(m) for m in self.counts))
        if self.N < 1:
            raise ValueError("a branch class needs at least one run")

    @property
    def N(self) -> int:
        return sum(self.counts)

    @property
    def n(self) -> int:
        return len(self.counts)

    def __iter__(self):
        return iter(self.counts)


def class_count(n: int, N: int) -> int:
    return math.comb(N + n - 1, n - 1)


@dataclass(frozen=True, eq=False)
class BranchEnsemble:
    """All count classes for (n, N), canonical order.

    ``counts`` is an int64 array of shape ``(C, n)``; ``dist`` is optional
    because the class structure itself does not depend on any weights.
    """

    n: int
    N: int
    counts: np.ndarray
    dist: OutcomeDistribution | None = None

    def __len__(self):
        return self.counts.shape[0]

    @property
    def classes(self) -> Iterator[BranchClass]:
        for row in self.counts.tolist():
            yield BranchClass(tuple(row))

    def __iter__(self):
        return self.classes

    def with_distribution(self, dist: OutcomeDistribution) -> "BranchEnsemble":
        if dist.n != self.n:
            raise DimensionMismatch(f"ensemble has n={self.n}, distribution has n={dist.n}")
        return BranchEnsemble(self.n, self.N, self.counts, dist)

    def multiplicities(self) -> list[int]:
        return [class_multiplicity(c) for c in self.classes]

    def weights(self) -> list[Fraction]:
        if self.dist is None:
            raise ValueError("ensemble has no distribution attached")
        denom = self.dist.denominator**self.N
        return [Fraction(int(num), denom) for num in weight_numerators(self.dist, self.N)]


def enumerate_classes(n: int, N: int, cap: int | None = None) -> BranchEnsemble:
    if n < 1 or N < 1:
        raise ValueError("n and N must be positive")
    cap = class_cap() if cap is None else cap
    total = class_count(n, N)
    if total > cap:
        raise CapExceeded(f"(n={n}, N={N}) has {total} classes, cap is {cap}")
    counts = kernels.compositions(n, N)
    counts.setflags(write=False)
    return BranchEnsemble(n, N, counts)


def class_multiplicity(cls: BranchClass | Sequence[int]) -> int:
    """Number of outcome sequences with these counts, N! / (m_1! ... m_n!)."""
    counts = tuple(cls)
    out, remaining = 1, sum(counts)
    for m in counts:
        out *= math.comb(remaining, m)
        remaining -= m
    return out


def class_weight(cls: BranchClass | Sequence[int], dist: OutcomeDistribution) -> Fraction:
    """Summed squared norm of every sequence in the class: multiplicity * prod q_j**m_j."""
    counts = tuple(cls)
    if len(counts) != dist.n:
        raise DimensionMismatch(f"class has n={len(counts)}, distribution has n={dist.n}")
    w = Fraction(class_multiplicity(counts))
    for qj, m in zip(dist.q, counts):
        w *= qj**m
    return w


def weight_numerators(dist: OutcomeDistribution, N: int) -> np.ndarray:
    """Class weights times ``dist.denominator**N``, in canonical class order.

    Returns an object array of Python ints. The table is built suffix by
    suffix: entry r of level j lists the numerators of every composition
    of r over outcomes j..n-1, so each class costs one big-int product.
    """
    a = dist.numerators()
    n = len(a)

    def powers(x):
        p = [1] * (N + 1)
        for m in range(1, N + 1):
            p[m] = p[m - 1] * x
        return p

    last = powers(a[n - 1])
    suffix = [np.array([last[r]], dtype=object) for r in range(N + 1)]
    for j in range(n - 2, -1, -1):
        p = powers(a[j])
        level = [None] * (N + 1)
        for r in (range(N + 1) if j > 0 else (N,)):
            level[r] = np.concatenate([(math.comb(r, m) * p[m]) * suffix[r - m] for m in range(r + 1)])
        suffix = level
    return suffix[N]
