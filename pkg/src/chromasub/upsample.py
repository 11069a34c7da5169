"""Client-side 2x chroma upsampling.

Subsampled chroma sites sit at the centers of the 2x2 blocks, so every
full-resolution pixel lies a quarter block off its own site along each
axis. Borders replicate the outermost sites, which mirrors the clamped
neighbor reads used when the blocks were encoded.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .geometry import ImagePlane
from .model import DEFAULT_WEIGHTS


class UpsampleMethod(Enum):
    """COPY repeats each site, BILI blends the four nearest sites with
    fixed quarter-offset weights, BICUBIC applies a separable Catmull-Rom
    filter at the same offsets."""

    COPY = "COPY"
    BILI = "BILI"
    BICUBIC = "BICUBIC"


def _bilinear(s: np.ndarray) -> np.ndarray:
    h, w = s.shape
    p = np.pad(s, 1, mode="edge")
    out = np.empty((2 * h, 2 * w))
    w_self = DEFAULT_WEIGHTS.w_self
    edge = DEFAULT_WEIGHTS.edge
    corner = DEFAULT_WEIGHTS.corner
    for dy, oy in ((0, -1), (1, 1)):
        vert = p[1 + oy : 1 + oy + h, 1:-1]
        for dx, ox in ((0, -1), (1, 1)):
            horiz = p[1:-1, 1 + ox : 1 + ox + w]
            diag = p[1 + oy : 1 + oy + h, 1 + ox : 1 + ox + w]
            # accumulate in the same order as the block model so that
            # encoder-side estimates and decoder output agree bitwise
            mix = corner * diag + edge * vert + edge * horiz
            out[dy::2, dx::2] = w_self * s + mix
    return out


# Catmull-Rom taps for the two phases at quarter offsets. Keys are the
# output parity; values pair site offsets with their weights. All weights
# are exact multiples of 1/128 and sum to 1.
_CUBIC_PHASES = {
    0: ((-2, -1, 0, 1), (-3.0 / 128.0, 29.0 / 128.0, 111.0 / 128.0, -9.0 / 128.0)),
    1: ((-1, 0, 1, 2), (-9.0 / 128.0, 111.0 / 128.0, 29.0 / 128.0, -3.0 / 128.0)),
}


def _cubic_axis(a: np.ndarray) -> np.ndarray:
    """Upsample 2x along the first axis with the phase filters."""
    n = a.shape[0]
    p = np.pad(a, ((2, 2), (0, 0)), mode="edge")
    out = np.empty((2 * n, a.shape[1]))
    for phase, (offsets, taps) in _CUBIC_PHASES.items():
        acc = taps[0] * p[2 + offsets[0] : 2 + offsets[0] + n]
        for off, tap in zip(offsets[1:], taps[1:]):
            acc = acc + tap * p[2 + off : 2 + off + n]
        out[phase::2] = acc
    return out


def upsample(method: UpsampleMethod, plane: ImagePlane) -> ImagePlane:
    """Double a chroma plane along both axes; output stays real-valued."""
    method = UpsampleMethod(method)
    s = plane.data
    if method is UpsampleMethod.COPY:
        out = np.repeat(np.repeat(s, 2, axis=0), 2, axis=1)
    elif method is UpsampleMethod.BILI:
        out = _bilinear(s)
    else:
        out = _cubic_axis(_cubic_axis(s).T).T
    return ImagePlane(out)
