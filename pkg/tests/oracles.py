"""Independent reference computations used by the tests."""
import random
from collections import Counter
from fractions import Fraction
from itertools import product

from branchlab.core import validate_distribution


def random_distribution(rng: random.Random, n: int, max_weight: int = 12):
    """Random rational distribution; zero entries allowed when max_weight allows 0."""
    while True:
        w = [rng.randint(0, max_weight) for _ in range(n)]
        if sum(w):
            break
    s = sum(w)
    return validate_distribution([Fraction(x, s) for x in w])


def strictly_positive_distribution(rng: random.Random, n: int, max_weight: int = 12):
    w = [rng.randint(1, max_weight) for _ in range(n)]
    s = sum(w)
    return validate_distribution([Fraction(x, s) for x in w])


def sequences(n, N):
    """Every outcome sequence (0-based indices) of N runs."""
    return product(range(n), repeat=N)


def counts_of(seq, n):
    c = Counter(seq)
    return tuple(c[j] for j in range(n))


def brute_class_weights(dist, N):
    """Per-class weight by summing prod q over every explicit sequence."""
    out = Counter()
    for seq in sequences(dist.n, N):
        w = Fraction(1)
        for i in seq:
            w *= dist.q[i]
        out[counts_of(seq, dist.n)] += w
    return out


def binomial_outside(N, p, eps):
    """Exact weight of m with |m/N - p| > eps for a two-outcome measurement, summed term by term."""
    from math import comb

    p = Fraction(p)
    total = Fraction(0)
    for m in range(N + 1):
        if abs(Fraction(m, N) - p) > eps:
            total += comb(N, m) * p**m * (1 - p) ** (N - m)
    return total


def sequence_level_average(n, N, valid):
    """Average perceived count of each outcome over valid sequences.

    ``valid`` maps each sequence (tuple of 0-based outcomes) to 0 or 1;
    the per-sequence probability factor is 1 throughout.
    """
    num = [0] * n
    den = 0
    for seq in sequences(n, N):
        v = valid(seq)
        if v:
            den += v
            for i in seq:
                num[i] += v
    return tuple(Fraction(x, den) for x in num)


def exhaustive_feasible(dist, N):
    """All admissible class-level assignments meeting N*q exactly (n-outcome, tiny N)."""
    from math import comb

    classes = sorted(c for c in product(range(N + 1), repeat=dist.n) if sum(c) == N)

    def mult(c):
        out, r = 1, N
        for m in c:
            out *= comb(r, m)
            r -= m
        return out

    target = tuple(N * q for q in dist.q)
    hits = []
    for k in product(*(range(mult(c) + 1) for c in classes)):
        K = sum(k)
        if not K:
            continue
        avg = tuple(Fraction(sum(c[j] * kk for c, kk in zip(classes, k)), K) for j in range(dist.n))
        if avg == target:
            hits.append(dict(zip(classes, k)))
    return classes, hits
