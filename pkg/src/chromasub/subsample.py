"""Fixed 4:2:0 chroma subsamplers used as baselines and as the pre-pass.

Every operator here maps a full-resolution chroma plane (even dimensions)
to one real-valued sample per 2x2 block. Quantization is left to the
caller so the same operators can feed both codecs and error models.
"""

from __future__ import annotations

from enum import Enum

import numpy as np
from scipy import ndimage

from .geometry import ImagePlane, block_grid_shape


class BaselineMethod(Enum):
    """Non-adaptive subsampling rules.

    A averages all four block samples, L the left column, R the right
    column, DIRECT keeps the top-left sample, and MPEG_B applies a
    13-tap horizontal anti-alias filter before picking the top-left
    position.
    """

    A = "A"
    L = "L"
    R = "R"
    DIRECT = "DIRECT"
    MPEG_B = "MPEG_B"


MPEG_B_TAPS = (2, 0, -4, -3, 5, 19, 26, 19, 5, -3, -4, 0, 2)

assert sum(MPEG_B_TAPS) == 64, "anti-alias taps must sum to the 1/64 normalizer"


def _quads(plane: ImagePlane):
    """The four per-block sample grids (s1, s2, s3, s4) in zigzag order."""
    block_grid_shape(plane)  # validates even dimensions
    d = plane.data
    return d[0::2, 0::2], d[0::2, 1::2], d[1::2, 0::2], d[1::2, 1::2]


def subsample_baseline(method: BaselineMethod, chroma: ImagePlane) -> ImagePlane:
    """Subsample one chroma plane with a fixed rule; output is unquantized."""
    method = BaselineMethod(method)
    s1, s2, s3, s4 = _quads(chroma)
    if method is BaselineMethod.A:
        out = (s1 + s2 + s3 + s4) / 4.0
    elif method is BaselineMethod.L:
        out = (s1 + s3) / 2.0
    elif method is BaselineMethod.R:
        out = (s2 + s4) / 2.0
    elif method is BaselineMethod.DIRECT:
        out = s1.copy()
    else:
        taps = np.array(MPEG_B_TAPS, dtype=np.float64)
        filtered = ndimage.correlate1d(chroma.data, taps, axis=1, mode="nearest") / 64.0
        out = filtered[0::2, 0::2]
    return ImagePlane(out)


def chen_u3v2(u: ImagePlane, v: ImagePlane) -> tuple[ImagePlane, ImagePlane]:
    """Position-split rule for Bayer layouts: U from s3, V from s2."""
    _, _, u3, _ = _quads(u)
    _, v2, _, _ = _quads(v)
    return ImagePlane(u3.copy()), ImagePlane(v2.copy())


def color_domination(u: ImagePlane, v: ImagePlane) -> tuple[ImagePlane, ImagePlane]:
    """Column-split rule for dual-exposure layouts.

    U is averaged over the left column of each block and V over the right
    column, matching which chroma channel each column's extra sample
    dominates.
    """
    return subsample_baseline(BaselineMethod.L, u), subsample_baseline(BaselineMethod.R, v)
