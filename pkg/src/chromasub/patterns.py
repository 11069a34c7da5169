"""Sensor color layouts over 2x2 tiles.

A pattern records which color channels exist at each of the four tile
positions, in zigzag order (top-left, top-right, bottom-left, bottom-right).
Three families are supported:

* ``rgb``: every position carries all three channels (full-color image).
* ``bayer``: one channel per position, two greens plus one red and one blue.
* ``dtdi``: two channels per position, green paired with red or blue in
  alternating columns (a dual-exposure sensor layout).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import PatternError

CHANNELS = ("R", "G", "B")


class PatternKind(str, Enum):
    RGB = "rgb"
    BAYER = "bayer"
    DTDI = "dtdi"


@dataclass(frozen=True)
class CfaPattern:
    """Channels recorded at each 2x2 tile position.

    ``color_sets[i]`` is an ordered tuple of channel names for zigzag
    position i. The order within a set fixes the iteration order of
    per-channel error terms, which keeps floating-point results
    reproducible.
    """

    kind: PatternKind
    variant: str
    color_sets: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if len(self.color_sets) != 4:
            raise PatternError(f"need 4 color sets, got {len(self.color_sets)}")
        sizes = {len(s) for s in self.color_sets}
        if len(sizes) != 1:
            raise PatternError(f"color sets disagree on size: {self.color_sets}")
        counts = {c: 0 for c in CHANNELS}
        for s in self.color_sets:
            if len(set(s)) != len(s):
                raise PatternError(f"duplicate channel in color set {s}")
            for c in s:
                if c not in counts:
                    raise PatternError(f"unknown channel {c!r}")
                counts[c] += 1
        expected = {
            PatternKind.RGB: {"R": 4, "G": 4, "B": 4},
            PatternKind.BAYER: {"R": 1, "G": 2, "B": 1},
            PatternKind.DTDI: {"R": 2, "G": 4, "B": 2},
        }[self.kind]
        if counts != expected:
            raise PatternError(
                f"{self.kind.value} tile must carry {expected} channels, got {counts}"
            )

    @property
    def samples_per_pixel(self) -> int:
        return len(self.color_sets[0])

    def channels_at(self, x: int, y: int) -> tuple[str, ...]:
        """Channels recorded at absolute pixel (x, y); the tile repeats every 2."""
        return self.color_sets[(y % 2) * 2 + (x % 2)]


RGB_VARIANT = "default"

_RGB_SETS = ((("R", "G", "B"),) * 4)

_BAYER_SETS = {
    "a": (("G",), ("R",), ("B",), ("G",)),
    "b": (("R",), ("G",), ("G",), ("B",)),
    "c": (("B",), ("G",), ("G",), ("R",)),
    "d": (("G",), ("B",), ("R",), ("G",)),
}

_DTDI_SETS = {
    "a": (("G", "B"), ("G", "R"), ("G", "B"), ("G", "R")),
    "b": (("G", "R"), ("G", "B"), ("G", "R"), ("G", "B")),
}


def pattern_for(kind, variant: str | None = None) -> CfaPattern:
    """Look up a supported pattern by kind and variant.

    ``kind`` accepts a PatternKind or its string value. The variant
    defaults to "default" for rgb and "a" for the CFA kinds.
    """
    try:
        k = PatternKind(kind)
    except ValueError:
        raise PatternError(f"unknown pattern kind {kind!r}") from None
    if k is PatternKind.RGB:
        v = variant if variant is not None else RGB_VARIANT
        if v != RGB_VARIANT:
            raise PatternError(f"rgb has no variant {v!r}")
        return CfaPattern(k, RGB_VARIANT, _RGB_SETS)
    table = _BAYER_SETS if k is PatternKind.BAYER else _DTDI_SETS
    v = variant if variant is not None else "a"
    if v not in table:
        raise PatternError(f"{k.value} has no variant {v!r}, choose from {sorted(table)}")
    return CfaPattern(k, v, table[v])


def supported_patterns() -> tuple[CfaPattern, ...]:
    """All seven supported patterns: rgb, bayer a-d, dtdi a-b."""
    out = [pattern_for(PatternKind.RGB)]
    out += [pattern_for(PatternKind.BAYER, v) for v in sorted(_BAYER_SETS)]
    out += [pattern_for(PatternKind.DTDI, v) for v in sorted(_DTDI_SETS)]
    return tuple(out)
