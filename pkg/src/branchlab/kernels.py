"""Hot numeric kernels.

Every kernel exists twice: a loop version compiled with numba
(``*_loop``) and a vectorized numpy version (``*_numpy``). The public
name dispatches on :data:`branchlab._jit.USE_NUMBA`. Both versions must
agree bit-for-bit; ``tests/test_kernels.py`` checks that and
``benchmarks/bench_kernels.py`` times them against each other.

Exact (big-integer) arithmetic never enters these kernels. They only
handle int64 count arrays, uint64 PRNG words and float64 log-weights.
"""
from __future__ import annotations

import math

import numpy as np

from ._jit import USE_NUMBA, njit

GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


# --------------------------------------------------------------------------
# compositions of N into n parts, lexicographic ascending


@njit
def compositions_loop(n, N, total):
    out = np.zeros((total, n), dtype=np.int64)
    cur = np.zeros(n, dtype=np.int64)
    cur[n - 1] = N
    for row in range(total):
        for j in range(n):
            out[row, j] = cur[j]
        if row == total - 1:
            break
        # rightmost i < n-1 with mass to its right
        i = n - 2
        tail = cur[n - 1]
        while tail == 0:
            tail += cur[i]
            i -= 1
        cur[i] += 1
        for t in range(i + 1, n):
            cur[t] = 0
        cur[n - 1] = tail - 1
    return out


def compositions_numpy(n, N):
    # table[r] holds the compositions of r into k parts for the current k
    table = [np.array([[r]], dtype=np.int64) for r in range(N + 1)]
    for k in range(2, n + 1):
        new = []
        for r in range(N + 1):
            blocks = []
            for m in range(r + 1):
                tail = table[r - m]
                head = np.full((tail.shape[0], 1), m, dtype=np.int64)
                blocks.append(np.hstack([head, tail]))
            new.append(np.vstack(blocks))
        table = new
    return table[N]


def compositions(n: int, N: int) -> np.ndarray:
    """All count vectors of length ``n`` summing to ``N``, shape ``(C(N+n-1, n-1), n)``."""
    total = math.comb(N + n - 1, n - 1)
    if USE_NUMBA:
        return compositions_loop(n, N, total)
    return compositions_numpy(n, N)


# --------------------------------------------------------------------------
# log-space class weights (approximate path for very large N)


def _lgamma_table(N):
    return np.array([math.lgamma(k + 1) for k in range(N + 1)], dtype=np.float64)


@njit
def log_class_weights_loop(counts, log_q, lfact):
    total, n = counts.shape
    N = 0
    for j in range(n):
        N += counts[0, j]
    out = np.empty(total, dtype=np.float64)
    for row in range(total):
        acc = lfact[N]
        for j in range(n):
            m = counts[row, j]
            acc -= lfact[m]
            if m > 0:
                acc += m * log_q[j]
        out[row] = acc
    return out


def log_class_weights_numpy(counts, log_q, lfact):
    N = int(counts[0].sum())
    # 0 * log(0) counts as 0
    with np.errstate(invalid="ignore"):
        terms = np.where(counts > 0, counts * log_q[None, :], 0.0)
    acc = lfact[N] - lfact[counts].sum(axis=1)
    for j in range(counts.shape[1]):
        acc = acc + terms[:, j]
    return acc


def log_class_weights(counts: np.ndarray, q) -> np.ndarray:
    """Natural log of multiplicity * prod q_j**m_j for every row of ``counts``.

    Rows whose class has zero weight come back as ``-inf``.
    """
    counts = np.ascontiguousarray(counts, dtype=np.int64)
    qf = np.array([float(x) for x in q], dtype=np.float64)
    with np.errstate(divide="ignore"):
        log_q = np.log(qf)
    N = int(counts[0].sum())
    lfact = _lgamma_table(N)
    if USE_NUMBA:
        return log_class_weights_loop(counts, log_q, lfact)
    return log_class_weights_numpy(counts, log_q, lfact)


# --------------------------------------------------------------------------
# splitmix64


@njit
def splitmix64_loop(seed, size):
    out = np.empty(size, dtype=np.uint64)
    state = np.uint64(seed)
    gamma = np.uint64(0x9E3779B97F4A7C15)
    m1 = np.uint64(0xBF58476D1CE4E5B9)
    m2 = np.uint64(0x94D049BB133111EB)
    s30 = np.uint64(30)
    s27 = np.uint64(27)
    s31 = np.uint64(31)
    for i in range(size):
        state = state + gamma
        z = state
        z = (z ^ (z >> s30)) * m1
        z = (z ^ (z >> s27)) * m2
        out[i] = z ^ (z >> s31)
    return out


def splitmix64_numpy(seed, size):
    # the state after k steps is seed + k*gamma, so the stream vectorizes
    k = np.arange(1, size + 1, dtype=np.uint64)
    z = np.uint64(seed) + k * GOLDEN_GAMMA
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def splitmix64(seed: int, size: int) -> np.ndarray:
    """First ``size`` outputs of splitmix64 started from ``seed``."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    if USE_NUMBA:
        return splitmix64_loop(np.uint64(seed), size)
    return splitmix64_numpy(seed, size)


# --------------------------------------------------------------------------
# threshold classification of uniform words


@njit
def classify_loop(words, thresholds, offset):
    out = np.empty(words.shape[0], dtype=np.int64)
    k = thresholds.shape[0]
    for i in range(words.shape[0]):
        u = words[i]
        j = 0
        while j < k and u >= thresholds[j]:
            j += 1
        out[i] = offset + j
    return out


def classify_numpy(words, thresholds, offset):
    return offset + np.searchsorted(thresholds, words, side="right").astype(np.int64)


def classify(words: np.ndarray, thresholds: np.ndarray, offset: int) -> np.ndarray:
    """0-based outcome index for each word: ``offset`` plus the number of thresholds <= word."""
    if USE_NUMBA:
        return classify_loop(words, thresholds, np.int64(offset))
    return classify_numpy(words, thresholds, offset)


@njit
def sample_counts_loop(seeds, size, thresholds, offset, n):
    """Outcome tallies for many independent seeded runs (one row per seed)."""
    out = np.zeros((seeds.shape[0], n), dtype=np.int64)
    k = thresholds.shape[0]
    gamma = np.uint64(0x9E3779B97F4A7C15)
    m1 = np.uint64(0xBF58476D1CE4E5B9)
    m2 = np.uint64(0x94D049BB133111EB)
    s30 = np.uint64(30)
    s27 = np.uint64(27)
    s31 = np.uint64(31)
    for r in range(seeds.shape[0]):
        state = seeds[r]
        for _ in range(size):
            state = state + gamma
            z = state
            z = (z ^ (z >> s30)) * m1
            z = (z ^ (z >> s27)) * m2
            u = z ^ (z >> s31)
            j = 0
            while j < k and u >= thresholds[j]:
                j += 1
            out[r, offset + j] += 1
    return out


def sample_counts_numpy(seeds, size, thresholds, offset, n):
    out = np.zeros((seeds.shape[0], n), dtype=np.int64)
    for r, seed in enumerate(seeds):
        idx = classify_numpy(splitmix64_numpy(int(seed), size), thresholds, offset)
        out[r] = np.bincount(idx, minlength=n)
    return out


def sample_counts(seeds, size: int, thresholds: np.ndarray, offset: int, n: int) -> np.ndarray:
    seeds = np.asarray([int(s) for s in seeds], dtype=np.uint64)
    if USE_NUMBA:
        return sample_counts_loop(seeds, size, thresholds, np.int64(offset), n)
    return sample_counts_numpy(seeds, size, thresholds, offset, n)
