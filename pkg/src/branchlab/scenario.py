"""Scenario files.

A scenario is a flat ``key = value`` text file::

    # fair coin, concentration of branch weight
    name = fair-coin
    command = typicality
    q = 1/2, 1/2
    N = 4, 16, 64
    epsilon = 1/10

Blank lines and lines starting with ``#`` are ignored. Lists are
comma-separated and may be wrapped in ``[...]``; items may be quoted.
Every key may appear once. Unknown keys, and keys the command does not
use, are errors.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, fields, replace
from fractions import Fraction

from .core import (
    OutcomeDistribution,
    as_fraction,
    format_rational,
    validate_distribution,
)
from .errors import ParseError, SchemaError

COMMANDS = (
    "typicality",
    "branch-stats",
    "validity-feasibility",
    "validity-joint",
    "achievable-set",
    "collapse-sample",
    "chain-demo",
)

# command -> (required keys, optional keys); "name" and "command" are always allowed
SCHEMA = {
    "typicality": ({"q", "N", "epsilon"}, {"delta", "n_max"}),
    "branch-stats": ({"q", "N"}, set()),
    "validity-feasibility": ({"q", "N"}, set()),
    "validity-joint": ({"q", "q_b", "N"}, set()),
    "achievable-set": ({"n", "N", "k_cap"}, {"q"}),
    "collapse-sample": ({"q", "N", "seed"}, {"trials"}),
    "chain-demo": ({"q"}, set()),
}

KEYS = ("name", "command", "q", "q_b", "n", "N", "epsilon", "delta", "seed", "k_cap", "n_max", "trials")


@dataclass(frozen=True)
class ScenarioConfig:
    command: str
    name: str = ""
    q: tuple[Fraction, ...] | None = None
    q_b: tuple[Fraction, ...] | None = None
    n: int | None = None
    N: tuple[int, ...] = ()
    epsilon: Fraction | None = None
    delta: Fraction | None = None
    seed: int | None = None
    k_cap: int | None = None
    n_max: int | None = None
    trials: int | None = None

    @property
    def dist(self) -> OutcomeDistribution:
        return validate_distribution(self.q)

    @property
    def dist_b(self) -> OutcomeDistribution:
        return validate_distribution(self.q_b)

    def present(self) -> set[str]:
        return {f.name for f in fields(self) if f.name not in ("name", "command") and getattr(self, f.name) not in (None, ())}

    def to_json(self) -> dict:
        out = {"name": self.name, "command": self.command}
        for key in self.present():
            value = getattr(self, key)
            if key in ("q", "q_b"):
                value = [format_rational(x) for x in value]
            elif key in ("epsilon", "delta"):
                value = format_rational(value)
            elif key == "N":
                value = list(value)
            out[key] = value
        return out


_RATIONAL = re.compile(r"[+-]?\d+(/\d+)?")


def _rational(raw: str) -> Fraction:
    """Integer or ``p/q``; decimals are refused so every input is written exactly."""
    text = raw.strip().strip("\"'").strip()
    if not _RATIONAL.fullmatch(text):
        raise ValueError(f"not a p/q rational: {raw!r}")
    return as_fraction(text)


def _split_list(raw: str) -> list[str]:
    raw = raw.strip()
    if raw.startswith("[") and raw.endswith("]"):
        raw = raw[1:-1]
    items = [item.strip().strip("\"'").strip() for item in raw.split(",")]
    if any(not item for item in items):
        raise ValueError("empty list item")
    return items


def _positive_int(raw: str) -> int:
    value = int(raw)
    if value < 1:
        raise ValueError(f"{value} is not positive")
    return value


def convert_value(key: str, raw: str):
    if key in ("name", "command"):
        return raw.strip().strip("\"'")
    if key in ("q", "q_b"):
        return tuple(_rational(x) for x in _split_list(raw))
    if key == "N":
        return tuple(_positive_int(x) for x in _split_list(raw))
    if key in ("epsilon", "delta"):
        return _rational(raw)
    if key == "seed":
        value = int(raw)
        if not 0 <= value < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        return value
    return _positive_int(raw)


def parse_values(text: str) -> dict:
    """Raw key/value pairs with typed values, before schema checks."""
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ParseError("expected 'key = value'", lineno)
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in KEYS:
            raise SchemaError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ParseError(f"duplicate key {key!r}", lineno)
        if not raw:
            raise ParseError(f"missing value for {key!r}", lineno)
        try:
            values[key] = convert_value(key, raw)
        except (ValueError, TypeError) as exc:
            raise ParseError(f"bad value for {key!r}: {exc}", lineno) from None
    return values


def build_config(values: dict) -> ScenarioConfig:
    """Apply defaults and the per-command schema; validate distributions."""
    command = values.get("command")
    if command is None:
        raise SchemaError("missing field 'command'")
    if command not in SCHEMA:
        raise SchemaError(f"unknown command {command!r}")
    required, optional = SCHEMA[command]
    given = {k for k in values if k not in ("name", "command")}
    missing = required - given
    if missing:
        raise SchemaError(f"{command}: missing field(s) {sorted(missing)}")
    extra = given - required - optional
    if extra:
        raise SchemaError(f"{command}: field(s) {sorted(extra)} not used by this command")
    values = dict(values)
    values.setdefault("name", command)
    config = ScenarioConfig(**values)
    for key in ("q", "q_b"):
        if getattr(config, key) is not None:
            validate_distribution(getattr(config, key))
    if config.q is not None and config.q_b is not None and len(config.q) != len(config.q_b):
        raise SchemaError("q and q_b have different lengths")
    if config.q is not None and config.n is not None and len(config.q) != config.n:
        raise SchemaError("q length does not match n")
    if command == "typicality" and config.delta is not None and config.n_max is None:
        config = replace(config, n_max=max(config.N))
    if command == "collapse-sample" and config.trials is None:
        config = replace(config, trials=1)
    if config.epsilon is not None and config.epsilon <= 0:
        raise SchemaError("epsilon must be positive")
    if config.delta is not None and not 0 < config.delta < 1:
        raise SchemaError("delta must lie strictly between 0 and 1")
    if command == "typicality" and any(b < a for a, b in zip(config.N, config.N[1:])):
        raise SchemaError("N values must be ascending")
    return config


def parse_scenario(text: str) -> ScenarioConfig:
    return build_config(parse_values(text))
