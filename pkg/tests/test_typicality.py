from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from branchlab.core import (
    BranchClass,
    class_weight,
    enumerate_classes,
    validate_distribution,
)
from branchlab.errors import CapExceeded
from branchlab.typicality import (
    NotReached,
    concentration_curve,
    min_sample_size,
    sharp_max,
    weight_in_window,
    weight_outside_float,
)

from .oracles import binomial_outside

HALF = validate_distribution(["1/2", "1/2"])
TENTH = Fraction(1, 10)

# frozen from an independent binomial-tail sum, sum_{m=40}^{60} C(100, m) / 2**100
INSIDE_N100 = Fraction(38219657665440688759455013113, 39614081257132168796771975168)
OUTSIDE_CURVE = {
    4: Fraction(5, 8),
    16: Fraction(14893, 32768),
    64: Fraction(953898460459537741, 9223372036854775808),
}
# first N with outside weight <= 1/100, from the same oracle scanned upward
MIN_N_HALF_TENTH_PERCENT = 155


def test_window_examples():
    r = weight_in_window(HALF, 2, Fraction(1, 4))
    assert r.weight_inside == Fraction(1, 2)
    assert r.weight_outside == Fraction(1, 2)
    for N in (1, 7, 30):
        assert weight_in_window(validate_distribution([1, 0]), N, Fraction(1, 1000)).weight_inside == 1


def test_window_N100_against_frozen_tail():
    r = weight_in_window(HALF, 100, TENTH)
    assert r.weight_inside == INSIDE_N100
    assert INSIDE_N100 == Fraction(sum(comb(100, m) for m in range(40, 61)), 2**100)


def test_lattice_point_on_window_is_inside():
    r = weight_in_window(validate_distribution(["1/3", "2/3"]), 3, Fraction(1, 100))
    assert r.weight_inside == Fraction(4, 9)
    assert r.weight_outside == Fraction(5, 9)


def test_boundary_is_inclusive():
    # m/N - q = 1/4 exactly for classes [0,2] and [2,0]
    assert weight_in_window(HALF, 2, Fraction(1, 2)).weight_inside == 1


def test_sharp_max_examples():
    assert sharp_max(HALF, 4) == BranchClass((2, 2))
    assert sharp_max(validate_distribution([1, 0, 0]), 7) == BranchClass((7, 0, 0))
    assert sharp_max(validate_distribution(["1/4", "3/4"]), 4) == BranchClass((1, 3))


def test_sharp_max_tie_breaks_canonically():
    # N odd with q=(1/2,1/2): [2,3] and [3,2] tie; the first in lexicographic order wins
    assert sharp_max(HALF, 5) == BranchClass((2, 3))


def test_min_sample_size_examples():
    assert min_sample_size(validate_distribution([1, 0]), TENTH, Fraction(1, 100), 10) == 1
    assert min_sample_size(HALF, Fraction(1, 2), Fraction(1, 100), 10) == 1
    assert min_sample_size(HALF, TENTH, Fraction(1, 100), 200) == MIN_N_HALF_TENTH_PERCENT
    assert binomial_outside(155, Fraction(1, 2), TENTH) <= Fraction(1, 100) < binomial_outside(154, Fraction(1, 2), TENTH)


def test_min_sample_size_not_reached():
    got = min_sample_size(HALF, TENTH, Fraction(1, 100), 20)
    assert isinstance(got, NotReached)
    assert got.last_weight_outside == binomial_outside(20, Fraction(1, 2), TENTH)


def test_min_sample_size_rejects_bad_delta():
    with pytest.raises(ValueError):
        min_sample_size(HALF, TENTH, Fraction(1), 5)


def test_concentration_curve_examples():
    assert concentration_curve(validate_distribution([1, 0]), TENTH, [1, 10, 100]) == [(1, 0), (10, 0), (100, 0)]
    assert concentration_curve(HALF, TENTH, [4, 16, 64]) == sorted(OUTSIDE_CURVE.items())
    for N, value in OUTSIDE_CURVE.items():
        assert value == binomial_outside(N, Fraction(1, 2), TENTH)


def test_concentration_curve_parallel_matches_serial():
    Ns = [4, 16, 64, 100]
    assert concentration_curve(HALF, TENTH, Ns, jobs=3) == concentration_curve(HALF, TENTH, Ns)


def test_concentration_curve_requires_ascending():
    with pytest.raises(ValueError):
        concentration_curve(HALF, TENTH, [16, 4])


def test_cap_exceeded():
    with pytest.raises(CapExceeded):
        weight_in_window(validate_distribution(["1/3"] * 3), 50, TENTH, cap=100)


def test_float_path_tracks_exact():
    for N in (16, 64, 256):
        exact = weight_in_window(HALF, N, TENTH).weight_outside
        assert weight_outside_float(HALF, N, TENTH) == pytest.approx(float(exact), rel=1e-9)
    d = validate_distribution(["1/6", "1/3", "1/2"])
    exact = weight_in_window(d, 40, TENTH).weight_outside
    assert weight_outside_float(d, 40, TENTH) == pytest.approx(float(exact), rel=1e-9)


def test_window_weight_equals_direct_class_sum():
    d = validate_distribution(["1/5", "3/10", "1/2"])
    eps = Fraction(1, 8)
    N = 9
    inside = sum(
        class_weight(c, d)
        for c in enumerate_classes(3, N)
        if all(abs(Fraction(m, N) - q) <= eps for m, q in zip(c.counts, d.q))
    )
    assert weight_in_window(d, N, eps).weight_inside == inside


positive_q = st.lists(st.integers(1, 9), min_size=2, max_size=3).map(
    lambda w: validate_distribution([Fraction(x, sum(w)) for x in w])
)


@settings(max_examples=40, deadline=None)
@given(positive_q, st.integers(1, 20), st.fractions(min_value=Fraction(1, 50), max_value=Fraction(1, 2)), st.fractions(min_value=0, max_value=Fraction(1, 2)))
def test_complementarity_and_epsilon_monotonicity(dist, N, eps, extra):
    small = weight_in_window(dist, N, eps)
    big = weight_in_window(dist, N, eps + extra)
    assert small.weight_inside + small.weight_outside == 1
    assert small.weight_inside <= big.weight_inside


@settings(max_examples=25, deadline=None)
@given(positive_q, st.integers(1, 12))
def test_chebyshev_union_bound(dist, k):
    eps = Fraction(1, 10)
    N = 4 * k
    bound = sum(q * (1 - q) for q in dist.q) / (N * eps * eps)
    assert weight_in_window(dist, N, eps).weight_outside <= bound


@settings(max_examples=40, deadline=None)
@given(positive_q, st.integers(1, 40))
def test_mode_within_one_lattice_step(dist, N):
    mode = sharp_max(dist, N)
    bound = Fraction(1, N) + max(dist.q)
    assert all(abs(Fraction(m, N) - q) < bound for m, q in zip(mode.counts, dist.q))
    # tighter, still true for multinomial modes: each count within n of N*q
    assert all(abs(m - N * q) <= dist.n for m, q in zip(mode.counts, dist.q))
