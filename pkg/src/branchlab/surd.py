"""Exact real numbers of the form sum_r c_r * sqrt(r).

Amplitudes sqrt(q_j) of rational Born weights are usually irrational, yet
sums and rational multiples of them must compare exactly. Each value is a
map from square-free positive radicands ``r`` to rational coefficients.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache


@lru_cache(maxsize=4096)
def split_square(k: int) -> tuple[int, int]:
    """Return ``(s, r)`` with ``k == s*s*r`` and ``r`` square-free."""
    if k <= 0:
        raise ValueError("k must be positive")
    s, r = 1, 1
    p = 2
    while p * p <= k:
        e = 0
        while k % p == 0:
            k //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            r *= p
        p += 1 if p == 2 else 2
    return s, r * k


class Surd:
    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        for r, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[int(r)] = clean.get(int(r), Fraction(0)) + c
        self._terms = {r: c for r, c in sorted(clean.items()) if c}

    @classmethod
    def rational(cls, x) -> "Surd":
        return cls({1: Fraction(x)})

    @classmethod
    def sqrt(cls, x) -> "Surd":
        x = Fraction(x)
        if x < 0:
            raise ValueError("square root of a negative rational")
        if x == 0:
            return cls()
        # sqrt(p/q) = sqrt(p*q) / q
        s, r = split_square(x.numerator * x.denominator)
        return cls({r: Fraction(s, x.denominator)})

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def is_rational(self) -> bool:
        return set(self._terms) <= {1}

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self._terms.get(1, Fraction(0))

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Surd.rational(other)
        if not isinstance(other, Surd):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Surd.rational(other)
        if not isinstance(other, Surd):
            return NotImplemented
        out = dict(self._terms)
        for r, c in other._terms.items():
            out[r] = out.get(r, Fraction(0)) + c
        return Surd(out)

    __radd__ = __add__

    def __neg__(self):
        return Surd({r: -c for r, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Surd({r: c * other for r, c in self._terms.items()})
        if not isinstance(other, Surd):
            return NotImplemented
        out: dict[int, Fraction] = {}
        for r1, c1 in self._terms.items():
            for r2, c2 in other._terms.items():
                g = math.gcd(r1, r2)
                # sqrt(r1*r2) = g * sqrt(r1/g * r2/g), the latter square-free
                r = (r1 // g) * (r2 // g)
                out[r] = out.get(r, Fraction(0)) + c1 * c2 * g
        return Surd(out)

    __rmul__ = __mul__

    def __float__(self):
        return float(sum(float(c) * math.sqrt(r) for r, c in self._terms.items()))

    def __repr__(self):
        return f"Surd({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for r, c in self._terms.items():
            parts.append(str(c) if r == 1 else f"{c}*sqrt({r})")
        return " + ".join(parts)

    def to_json(self) -> list[list]:
        return [[r, f"{c.numerator}/{c.denominator}"] for r, c in self._terms.items()]

    @classmethod
    def from_json(cls, data) -> "Surd":
        return cls({int(r): Fraction(c) for r, c in data})
