"""Validity-weighted branch averages and the Born-frequency feasibility problem.

A validity assignment marks some outcome sequences of N runs as valid
(v=1). Only per-class totals of valid sequences enter the averaged
outcome counts, so an assignment is stored as one integer per count
class, ``0 <= k_class <= multiplicity``. Nothing in an assignment refers
to the amplitudes: the averaged counts it produces are a single fixed
vector, and a fixed vector cannot equal ``N*q`` for two different q.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .core import (
    BranchClass,
    OutcomeDistribution,
    as_fraction,
    class_multiplicity,
    enumerate_classes,
    format_rational,
)
from .errors import (
    CapExceeded,
    DimensionMismatch,
    EmptyAssignment,
    MalformedCertificate,
    SameDistribution,
)

ACHIEVABLE_CAP = 10_000_000
SOLVER_CLASS_CAP = 900
EXHAUSTIVE_THRESHOLD = 4096


@dataclass(frozen=True, eq=False)
class ValidityAssignment:
    n: int
    N: int
    valid_counts: Mapping[BranchClass, int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for cls, k in self.valid_counts.items():
            if not isinstance(cls, BranchClass):
                cls = BranchClass(tuple(cls))
            if cls.n != self.n or cls.N != self.N:
                raise DimensionMismatch(f"class {cls.counts} is not an (n={self.n}, N={self.N}) class")
            k = int(k)
            if not 0 <= k <= class_multiplicity(cls):
                raise ValueError(f"k={k} outside [0, multiplicity] for class {cls.counts}")
            if k:
                clean[cls] = k
        if not clean:
            raise EmptyAssignment("no valid branch: the average has a zero denominator")
        object.__setattr__(self, "valid_counts", dict(sorted(clean.items())))

    def __eq__(self, other):
        if not isinstance(other, ValidityAssignment):
            return NotImplemented
        return (self.n, self.N, self.valid_counts) == (other.n, other.N, other.valid_counts)

    @classmethod
    def all_valid(cls, n: int, N: int) -> "ValidityAssignment":
        """Every sequence valid (v = 1 everywhere)."""
        return cls(n, N, {c: class_multiplicity(c) for c in enumerate_classes(n, N).classes})

    def total(self) -> int:
        return sum(self.valid_counts.values())

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "N": self.N,
            "valid_counts": [[list(c.counts), k] for c, k in self.valid_counts.items()],
        }


@dataclass(frozen=True)
class FrequencyVector:
    """Average perceived count of each outcome over the valid sequences (units: runs)."""

    N: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))
        if sum(self.values) != self.N:
            raise ValueError(f"frequency vector {self.values} does not sum to N={self.N}")

    @property
    def n(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def to_json(self) -> list[str]:
        return [format_rational(v) for v in self.values]


def equal_validity_frequency(n: int, N: int) -> FrequencyVector:
    """Averaged counts when every sequence is valid: N/n for each outcome, whatever the amplitudes."""
    if n < 1 or N < 1:
        raise ValueError("n and N must be positive")
    return FrequencyVector(N, (Fraction(N, n),) * n)


def weighted_average_counts(assignment: ValidityAssignment) -> FrequencyVector:
    """Average of m_j over valid sequences, sum_c m_j k_c / sum_c k_c."""
    if not assignment.valid_counts:
        raise EmptyAssignment("empty assignment")
    sums = [0] * assignment.n
    for cls, k in assignment.valid_counts.items():
        for j, m in enumerate(cls.counts):
            sums[j] += m * k
    total = assignment.total()
    return FrequencyVector(assignment.N, tuple(Fraction(s, total) for s in sums))


# --------------------------------------------------------------------------
# Born feasibility


@dataclass(frozen=True)
class Infeasible:
    """No admissible assignment reproduces N*q exactly."""

    q: tuple[Fraction, ...]
    N: int
    nodes: int


def born_targets(dist: OutcomeDistribution, N: int) -> tuple[Fraction, ...]:
    return tuple(N * qj for qj in dist.q)


def _constraint_rows(dist: OutcomeDistribution, counts: list[tuple[int, ...]], N: int) -> list[tuple[int, ...]]:
    """Integer coefficients (m_j*D - N*a_j) per class. The last outcome is
    dropped because the rows always sum to zero across outcomes."""
    D = dist.denominator
    a = dist.numerators()
    keep = max(dist.n - 1, 0)
    return [tuple(c[j] * D - N * a[j] for j in range(keep)) for c in counts]


def _solve_exhaustive(rows, mults):
    # itertools.product walks k vectors in lexicographic order
    nodes = 0
    for k in itertools.product(*(range(u + 1) for u in mults)):
        nodes += 1
        if not any(k):
            continue
        if all(sum(r[j] * kk for r, kk in zip(rows, k)) == 0 for j in range(len(rows[0]) if rows else 0)):
            return list(k), nodes
    return None, nodes


def _solve_dfs(rows, mults):
    """Lexicographically smallest nonzero k with sum_c k_c*rows[c] = 0.

    Depth-first over classes, k ascending. Each node is pruned by the
    interval relaxation of every constraint (reachable range of the
    remaining classes, integrality ignored) and by a gcd divisibility
    test; dead (depth, partial sums, any-nonzero) states are memoized.
    """
    C = len(rows)
    J = len(rows[0]) if rows else 0
    lo = [[0] * J for _ in range(C + 1)]
    hi = [[0] * J for _ in range(C + 1)]
    g = [[0] * J for _ in range(C + 1)]
    for c in range(C - 1, -1, -1):
        for j in range(J):
            v = rows[c][j] * mults[c]
            lo[c][j] = lo[c + 1][j] + min(0, v)
            hi[c][j] = hi[c + 1][j] + max(0, v)
            g[c][j] = math.gcd(g[c + 1][j], rows[c][j])
    dead: set = set()
    k = [0] * C
    nodes = 0

    def viable(c, sums):
        for j in range(J):
            need = -sums[j]
            if not lo[c][j] <= need <= hi[c][j]:
                return False
            if g[c][j] == 0:
                if need:
                    return False
            elif need % g[c][j]:
                return False
        return True

    def visit(c, sums, nonzero):
        nonlocal nodes
        nodes += 1
        if c == C:
            return nonzero and not any(sums)
        key = (c, sums, nonzero)
        if key in dead:
            return False
        row = rows[c]
        for kc in range(mults[c] + 1):
            nxt = tuple(s + kc * r for s, r in zip(sums, row))
            if viable(c + 1, nxt) and visit(c + 1, nxt, nonzero or kc > 0):
                k[c] = kc
                return True
        dead.add(key)
        return False

    if visit(0, (0,) * J, False):
        return k, nodes
    return None, nodes


def born_feasibility(
    dist: OutcomeDistribution,
    N: int,
    cap: int | None = None,
    exhaustive_threshold: int = EXHAUSTIVE_THRESHOLD,
    solver_cap: int = SOLVER_CLASS_CAP,
):
    """Find a validity assignment whose averaged counts equal N*q exactly.

    Returns the lexicographically smallest solution (canonical class
    order) as a :class:`ValidityAssignment`, or :class:`Infeasible`. The
    solution is re-checked with :func:`weighted_average_counts` before it
    is returned.
    """
    ens = enumerate_classes(dist.n, N, cap)
    if len(ens) > solver_cap:
        raise CapExceeded(f"{len(ens)} classes exceed the solver cap {solver_cap}")
    counts = [tuple(r) for r in ens.counts.tolist()]
    mults = [class_multiplicity(c) for c in counts]
    rows = _constraint_rows(dist, counts, N)
    space = math.prod(u + 1 for u in mults)
    if space <= exhaustive_threshold:
        k, nodes = _solve_exhaustive(rows, mults)
    else:
        k, nodes = _solve_dfs(rows, mults)
    if k is None:
        return Infeasible(dist.q, N, nodes)
    assignment = ValidityAssignment(dist.n, N, dict(zip(counts, k)))
    got = weighted_average_counts(assignment)
    if got.values != born_targets(dist, N):
        raise AssertionError(f"solver returned {got.values}, expected {born_targets(dist, N)}")
    return assignment


# --------------------------------------------------------------------------
# achievable frequency vectors


def achievable_set(n: int, N: int, k_cap: int, cap: int = ACHIEVABLE_CAP) -> frozenset[FrequencyVector]:
    """Every averaged-count vector reachable with 0 <= k_class <= min(k_cap, multiplicity).

    Takes no distribution: the set is a function of (n, N, k_cap) alone.
    """
    if k_cap < 1:
        raise ValueError("k_cap must be positive")
    ens = enumerate_classes(n, N)
    counts = [tuple(r) for r in ens.counts.tolist()]
    bounds = [min(k_cap, class_multiplicity(c)) for c in counts]
    space = math.prod(b + 1 for b in bounds)
    if space > cap:
        raise CapExceeded(f"search space {space} exceeds cap {cap}")
    # reachable (sum_c k_c*m_c, sum_c k_c) pairs, built class by class
    states = {((0,) * n, 0)}
    for c, b in zip(counts, bounds):
        states = {
            (tuple(s + kc * m for s, m in zip(sums, c)), total + kc)
            for sums, total in states
            for kc in range(b + 1)
        }
    return frozenset(
        FrequencyVector(N, tuple(Fraction(s, total) for s in sums)) for sums, total in states if total
    )


def sorted_vectors(vectors) -> list[FrequencyVector]:
    return sorted(vectors, key=lambda f: f.values)


# --------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """Record that one assignment cannot meet N*q for two different q.

    ``assignment_frequency`` is the all-valid averaged count vector, a
    concrete instance of the amplitude-free left-hand side. ``reason``
    names the first outcome on which the two targets differ.
    """

    n: int
    N: int
    q_A: tuple[Fraction, ...]
    q_B: tuple[Fraction, ...]
    target_A: tuple[Fraction, ...]
    target_B: tuple[Fraction, ...]
    assignment_frequency: tuple[Fraction, ...]
    reason: Mapping = field(default_factory=dict)

    def to_json(self) -> dict:
        fr = lambda xs: [format_rational(x) for x in xs]  # noqa: E731
        return {
            "n": self.n,
            "N": self.N,
            "q_A": fr(self.q_A),
            "q_B": fr(self.q_B),
            "target_A": fr(self.target_A),
            "target_B": fr(self.target_B),
            "assignment_frequency": fr(self.assignment_frequency),
            "reason": dict(self.reason),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, data: Mapping) -> "InfeasibilityCertificate":
        try:
            fr = lambda xs: tuple(as_fraction(x) for x in xs)  # noqa: E731
            return cls(
                n=int(data["n"]),
                N=int(data["N"]),
                q_A=fr(data["q_A"]),
                q_B=fr(data["q_B"]),
                target_A=fr(data["target_A"]),
                target_B=fr(data["target_B"]),
                assignment_frequency=fr(data["assignment_frequency"]),
                reason=dict(data["reason"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedCertificate(f"cannot read certificate: {exc}") from exc


def joint_infeasibility(dist_A: OutcomeDistribution, dist_B: OutcomeDistribution, N: int) -> InfeasibilityCertificate:
    if dist_A.n != dist_B.n:
        raise DimensionMismatch("distributions have different numbers of outcomes")
    if dist_A.q == dist_B.q:
        raise SameDistribution("identical distributions give identical targets")
    if N < 1:
        raise ValueError("N must be positive")
    tA, tB = born_targets(dist_A, N), born_targets(dist_B, N)
    coord = next(j for j in range(dist_A.n) if tA[j] != tB[j])
    return InfeasibilityCertificate(
        n=dist_A.n,
        N=N,
        q_A=dist_A.q,
        q_B=dist_B.q,
        target_A=tA,
        target_B=tB,
        assignment_frequency=equal_validity_frequency(dist_A.n, N).values,
        reason={"kind": "distinct_targets", "coordinate": coord + 1},
    )


def _check_shape(cert: InfeasibilityCertificate):
    if not isinstance(cert.n, int) or not isinstance(cert.N, int) or cert.n < 1 or cert.N < 1:
        raise MalformedCertificate("n and N must be positive integers")
    vectors = ("q_A", "q_B", "target_A", "target_B", "assignment_frequency")
    for name in vectors:
        if len(getattr(cert, name)) != cert.n:
            raise MalformedCertificate(f"{name} has the wrong length")
    for name in ("q_A", "q_B"):
        q = getattr(cert, name)
        if any(x < 0 for x in q) or sum(q) != 1:
            raise MalformedCertificate(f"{name} is not a distribution")
    for name in ("target_A", "target_B", "assignment_frequency"):
        if sum(getattr(cert, name)) != cert.N:
            raise MalformedCertificate(f"{name} does not sum to N={cert.N}")
    if cert.reason.get("kind") != "distinct_targets":
        raise MalformedCertificate(f"unknown reason {cert.reason!r}")
    coord = cert.reason.get("coordinate")
    if not isinstance(coord, int) or not 1 <= coord <= cert.n:
        raise MalformedCertificate("reason coordinate out of range")


def verify_certificate(cert: InfeasibilityCertificate) -> bool:
    """Independent re-check of every claim a certificate makes."""
    _check_shape(cert)
    N = cert.N
    if cert.target_A != tuple(N * x for x in cert.q_A):
        return False
    if cert.target_B != tuple(N * x for x in cert.q_B):
        return False
    if cert.target_A == cert.target_B:
        return False
    first = next(j for j in range(cert.n) if cert.target_A[j] != cert.target_B[j]) + 1
    if cert.reason["coordinate"] != first:
        return False
    if cert.assignment_frequency != (Fraction(N, cert.n),) * cert.n:
        return False
    # a single vector cannot coincide with two different targets
    return not (cert.assignment_frequency == cert.target_A and cert.assignment_frequency == cert.target_B)
