"""Random distribution kinds shared by the generator and the workload.

Every random step of the benchmark draws from its own deterministic
substream, derived from the experiment seed and a step label, so that
adding draws to one step never shifts the values seen by another.
"""
from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from typing import Union

from .errors import ParameterError


@dataclass(frozen=True)
class Uniform:
    """Uniform draw over the legal interval of the use site."""


@dataclass(frozen=True)
class Constant:
    """Always the same value; must lie inside the legal interval."""

    value: int


@dataclass(frozen=True)
class Special:
    """Locality-of-reference draw: with `locality_probability` the pick
    stays within +/- `refzone` of the anchor position, otherwise it is
    uniform over the whole interval."""

    refzone: int
    locality_probability: float = 0.9


Distribution = Union[Uniform, Constant, Special]


def substream(seed: int, label: str) -> random.Random:
    """Independent deterministic child stream for one step of the benchmark.

    The child seed is the first 8 bytes of sha256(seed:label), so streams
    are uncorrelated and stable across platforms.
    """
    digest = hashlib.sha256(f"{seed}:{label}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def parse_distribution(text: str) -> Distribution:
    """Parse 'uniform', 'constant:V' or 'special:REFZONE[:PROB]'."""
    parts = text.strip().lower().split(":")
    kind = parts[0]
    try:
        if kind == "uniform" and len(parts) == 1:
            return Uniform()
        if kind == "constant" and len(parts) == 2:
            return Constant(int(parts[1]))
        if kind == "special" and len(parts) in (2, 3):
            prob = float(parts[2]) if len(parts) == 3 else 0.9
            return Special(int(parts[1]), prob)
    except ValueError as exc:
        raise ParameterError(f"bad distribution {text!r}: {exc}") from None
    raise ParameterError(f"bad distribution {text!r}")


def format_distribution(dist: Distribution) -> str:
    if isinstance(dist, Uniform):
        return "uniform"
    if isinstance(dist, Constant):
        return f"constant:{dist.value}"
    if isinstance(dist, Special):
        return f"special:{dist.refzone}:{dist.locality_probability}"
    raise ParameterError(f"unknown distribution {dist!r}")


def validate_distribution(dist: Distribution, lo: int, hi: int, site: str,
                          allow_special: bool = False) -> None:
    """Check a distribution against the legal interval of its use site."""
    if isinstance(dist, Constant):
        if not lo <= dist.value <= hi:
            raise ParameterError(
                f"{site}: constant {dist.value} outside [{lo}, {hi}]")
    elif isinstance(dist, Special):
        if not allow_special:
            raise ParameterError(f"{site}: special distribution needs an "
                                 "anchor and is only valid for object references")
        if dist.refzone < 0:
            raise ParameterError(f"{site}: refzone must be >= 0")
        if not 0.0 <= dist.locality_probability <= 1.0:
            raise ParameterError(f"{site}: locality probability outside [0, 1]")
    elif not isinstance(dist, Uniform):
        raise ParameterError(f"{site}: unknown distribution {dist!r}")


def draw_bounded(dist: Distribution, rng: random.Random, lo: int, hi: int) -> int:
    """Draw one value from [lo, hi]; interval validity was checked up front."""
    if isinstance(dist, Uniform):
        return rng.randint(lo, hi)
    if isinstance(dist, Constant):
        return dist.value
    raise ParameterError("special distribution used without an anchor")


def draw_position(dist: Distribution, rng: random.Random, lo: int, hi: int,
                  length: int, anchor: int) -> int | None:
    """Pick a 1-based position into a collection of `length` members.

    `anchor` is the drawing object's own position, used by Special draws.
    Bounds clamp to [1, length]; returns None when no legal position exists.
    """
    if length <= 0:
        return None
    if isinstance(dist, Special):
        if rng.random() < dist.locality_probability:
            center = min(max(anchor, 1), length)
            a = max(1, center - dist.refzone)
            b = min(length, center + dist.refzone)
            return rng.randint(a, b)
        return rng.randint(1, length)
    if isinstance(dist, Constant):
        return min(max(dist.value, 1), length)
    a = max(1, lo)
    b = min(length, hi)
    if a > b:
        return None
    return rng.randint(a, b)
