"""Symbolic measurement chain: labeled product kets and linear basis rewrites.

A state is a finite sum of product kets ``|system>|detector>|observer>``
with exact real amplitudes. Time evolution is modeled only through its
action on basis kets, as an injective relabeling (:class:`BranchingRule`)
extended linearly. That is enough to replay the derivation in which the
observer splits into one version per outcome, and to show that pushing
the "set the detector by hand" rule through a superposition makes every
version aware.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

from .core import OutcomeDistribution
from .errors import NonInjectiveRule, UndefinedOnBasis
from .surd import Surd


class Role(str, enum.Enum):
    SYSTEM = "system"
    DETECTOR = "detector"
    OBSERVER = "observer"


ROLES = (Role.SYSTEM, Role.DETECTOR, Role.OBSERVER)
NO_READING = "Obs perceives no reading"


@dataclass(frozen=True, order=True)
class Label:
    role: Role
    tag: str

    def __post_init__(self):
        if not self.tag:
            raise ValueError("label tag must be nonempty")

    def __str__(self):
        return f"|{self.tag}>"


def system_label(i: int) -> Label:
    return Label(Role.SYSTEM, f"i={i}")


def detector_label(i: int) -> Label:
    return Label(Role.DETECTOR, f"D:{i}")


def observer_label(version: int | None = None, aware: bool = False) -> Label:
    """Observer ket; ``version=None`` is the pre-observation observer."""
    if version is None:
        return Label(Role.OBSERVER, NO_READING)
    if aware:
        return Label(Role.OBSERVER, f"ver. {version} of the obs. perceives and is aware of reading {version}")
    return Label(Role.OBSERVER, f"ver. {version} of the obs. perceives reading {version}")


_OBS_RE = re.compile(r"^ver\. (\d+) of the obs\. perceives (and is aware of )?reading (\d+)$")


class ObserverTag(NamedTuple):
    version: int
    reading: int
    aware: bool


def parse_observer_tag(tag: str) -> ObserverTag | None:
    m = _OBS_RE.match(tag)
    if m is None:
        return None
    return ObserverTag(int(m.group(1)), int(m.group(3)), m.group(2) is not None)


Basis = tuple[Label, ...]


@dataclass(frozen=True, eq=False)
class TensorState:
    """Sparse sum of product kets. Zero terms are never stored."""

    terms: Mapping[Basis, Surd] = field(default_factory=dict)
    roles: tuple[Role, ...] = ROLES

    def __post_init__(self):
        clean = {}
        for basis, coef in self.terms.items():
            basis = tuple(basis)
            if tuple(lab.role for lab in basis) != self.roles:
                raise ValueError(f"basis {basis} does not follow role order {self.roles}")
            if not isinstance(coef, Surd):
                coef = Surd.rational(coef)
            if coef:
                clean[basis] = coef
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    def __eq__(self, other):
        if not isinstance(other, TensorState):
            return NotImplemented
        return self.roles == other.roles and self.terms == other.terms

    def __len__(self):
        return len(self.terms)

    def __add__(self, other: "TensorState") -> "TensorState":
        if self.roles != other.roles:
            raise ValueError("cannot add states with different factor roles")
        out = dict(self.terms)
        for basis, coef in other.terms.items():
            out[basis] = out[basis] + coef if basis in out else coef
        return TensorState(out, self.roles)

    def scale(self, w) -> "TensorState":
        w = Fraction(w)
        return TensorState({b: c * w for b, c in self.terms.items()}, self.roles)

    __rmul__ = scale

    def squared_norm(self) -> Surd:
        total = Surd()
        for coef in self.terms.values():
            total = total + coef * coef
        return total

    def lines(self) -> list[str]:
        return [f"({coef}) " + " ".join(str(lab) for lab in basis) for basis, coef in self.terms.items()]

    def to_json(self) -> dict:
        return {
            "roles": [r.value for r in self.roles],
            "terms": [
                {"labels": [lab.tag for lab in basis], "coefficient": coef.to_json()}
                for basis, coef in self.terms.items()
            ],
        }


@dataclass(frozen=True, eq=False)
class BranchingRule:
    """Injective basis rewrite acting on the factors in ``acts_on``.

    Factors outside ``acts_on`` pass through untouched, so a rule written
    for the detector and observer alone applies to the full chain.
    """

    mapping: Mapping[Basis, Basis]
    acts_on: tuple[Role, ...] = ROLES

    def __post_init__(self):
        seen: dict[Basis, Basis] = {}
        for src, dst in self.mapping.items():
            for part in (src, dst):
                if tuple(lab.role for lab in part) != self.acts_on:
                    raise ValueError(f"{part} does not match the rule's factors {self.acts_on}")
            if dst in seen:
                raise NonInjectiveRule(f"{src} and {seen[dst]} both map to {dst}")
            seen[dst] = src
        object.__setattr__(self, "mapping", {tuple(k): tuple(v) for k, v in self.mapping.items()})

    @classmethod
    def identity(cls, basis: Iterable[Basis], acts_on: tuple[Role, ...] = ROLES) -> "BranchingRule":
        return cls({tuple(b): tuple(b) for b in basis}, acts_on)

    def rewrite(self, basis: Basis, roles: Sequence[Role]) -> Basis:
        pos = [roles.index(r) for r in self.acts_on]
        key = tuple(basis[p] for p in pos)
        try:
            image = self.mapping[key]
        except KeyError:
            raise UndefinedOnBasis(f"rule undefined on {key}") from None
        out = list(basis)
        for p, lab in zip(pos, image):
            out[p] = lab
        return tuple(out)


def apply_rule(rule: BranchingRule, state: TensorState) -> TensorState:
    out: dict[Basis, Surd] = {}
    for basis, coef in state.terms.items():
        image = rule.rewrite(basis, state.roles)
        # injectivity on the acted factors keeps full images distinct
        assert image not in out
        out[image] = coef
    return TensorState(out, state.roles)


class MeasurementChain(NamedTuple):
    before: TensorState
    rule: BranchingRule
    after: TensorState


def _ready_state(dist: OutcomeDistribution) -> TensorState:
    """sum_i a(i) |i>|D:i>|Obs perceives no reading>, with a(i) = sqrt(q_i)."""
    return TensorState(
        {
            (system_label(i), detector_label(i), observer_label()): Surd.sqrt(qi)
            for i, qi in enumerate(dist.q, start=1)
        }
    )


def build_measurement_chain(dist: OutcomeDistribution) -> MeasurementChain:
    """State before the observer looks, the splitting rule, and the split state."""
    before = _ready_state(dist)
    rule = BranchingRule(
        {
            (system_label(i), detector_label(i), observer_label()): (
                system_label(i),
                detector_label(i),
                observer_label(i),
            )
            for i in range(1, dist.n + 1)
        }
    )
    return MeasurementChain(before, rule, apply_rule(rule, before))


def hand_set_rule(n: int) -> BranchingRule:
    """Detector set to reading i by hand, then observed: the observer is aware of i."""
    return BranchingRule(
        {
            (detector_label(i), observer_label()): (detector_label(i), observer_label(i, aware=True))
            for i in range(1, n + 1)
        },
        acts_on=(Role.DETECTOR, Role.OBSERVER),
    )


def linearity_check(
    rule: BranchingRule,
    states: tuple[TensorState, TensorState],
    weights: tuple,
) -> bool:
    s1, s2 = states
    w1, w2 = (Fraction(w) for w in weights)
    lhs = apply_rule(rule, s1.scale(w1) + s2.scale(w2))
    rhs = apply_rule(rule, s1).scale(w1) + apply_rule(rule, s2).scale(w2)
    return lhs == rhs


@dataclass(frozen=True)
class EqualValidityReport:
    n_versions: int
    versions: tuple[int, ...]
    aware: tuple[bool, ...]
    states_equal: bool
    squared_norm: Surd
    derived: TensorState
    expected: TensorState
    transcript: tuple[str, ...]

    @property
    def all_aware(self) -> bool:
        return all(self.aware)


def equal_validity_demonstration(dist: OutcomeDistribution) -> EqualValidityReport:
    """Substitute the hand-set rule into the superposed state, term by term.

    The result is compared against the directly written state in which
    every version is aware. Linearity leaves no room for a version that
    perceives without being aware.
    """
    ready = _ready_state(dist)
    rule = hand_set_rule(dist.n)
    derived = apply_rule(rule, ready)
    expected = TensorState(
        {
            (system_label(i), detector_label(i), observer_label(i, aware=True)): Surd.sqrt(qi)
            for i, qi in enumerate(dist.q, start=1)
        }
    )
    tags = [parse_observer_tag(basis[2].tag) for basis in derived.terms]
    transcript = ["before observation:"]
    transcript += ["  " + s for s in ready.lines()]
    transcript.append("rule (detector set by hand, then observed):")
    transcript += [
        f"  {' '.join(map(str, src))} -> {' '.join(map(str, dst))}" for src, dst in rule.mapping.items()
    ]
    transcript.append("after linear extension:")
    transcript += ["  " + s for s in derived.lines()]
    norm = derived.squared_norm()
    transcript.append(f"squared norm: {norm}")
    transcript.append(f"matches directly written state: {derived == expected}")
    transcript += [f"version {t.version}: aware" if t.aware else f"version {t.version}: not aware" for t in tags]
    return EqualValidityReport(
        n_versions=len(tags),
        versions=tuple(t.version for t in tags),
        aware=tuple(t.aware for t in tags),
        states_equal=derived == expected,
        squared_norm=norm,
        derived=derived,
        expected=expected,
        transcript=tuple(transcript),
    )
