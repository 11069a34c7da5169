"""Sensor mosaic simulation, demosaicing, and CFA-domain reconstruction.

A CfaImage keeps only the channel values a sensor with the given pattern
would record: one value per pixel for Bayer layouts, two for dual-exposure
layouts, three for full color. Values are stored as dense planes, one per
recorded sample slot, in the order the pattern lists its channels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .colorspace import clamp_quantize, yuv_image_to_rgb
from .errors import ComparisonError, GeometryError, PatternError
from .geometry import (
    BlockIndex,
    ImagePlane,
    RgbImage,
    YuvImage,
    block_at,
    block_grid_shape,
    require_even,
)
from .patterns import CHANNELS, CfaPattern

# smoothing kernel for filling missing samples from the same channel's
# recorded neighbors; normalized per pixel by the local sample coverage
_FILL_KERNEL = np.array([[1.0, 2.0, 1.0], [2.0, 4.0, 2.0], [1.0, 2.0, 1.0]]) / 4.0


@dataclass(frozen=True, eq=False)
class CfaImage:
    """Recorded sensor samples for one image.

    ``planes[k]`` holds, for every pixel, the value of the k-th channel
    listed in the pattern's color set at that pixel position. All planes
    share the full image geometry.
    """

    pattern: CfaPattern
    planes: tuple[ImagePlane, ...]

    def __post_init__(self):
        if len(self.planes) != self.pattern.samples_per_pixel:
            raise PatternError(
                f"pattern records {self.pattern.samples_per_pixel} samples per pixel, "
                f"got {len(self.planes)} planes"
            )
        shapes = {p.data.shape for p in self.planes}
        if len(shapes) != 1:
            raise GeometryError(f"CFA planes disagree on shape: {sorted(shapes)}")
        require_even(self.planes[0], "CfaImage")

    @property
    def width(self) -> int:
        return self.planes[0].width

    @property
    def height(self) -> int:
        return self.planes[0].height


def _channel_masks(pattern: CfaPattern, height: int, width: int) -> dict[str, np.ndarray]:
    """Boolean presence mask per channel over the full image."""
    masks = {}
    for ch in CHANNELS:
        tile = np.array(
            [
                [ch in pattern.color_sets[0], ch in pattern.color_sets[1]],
                [ch in pattern.color_sets[2], ch in pattern.color_sets[3]],
            ]
        )
        masks[ch] = np.tile(tile, (height // 2, width // 2))
    return masks


def _slot_index(pattern: CfaPattern, position: int, channel: str) -> int:
    return pattern.color_sets[position].index(channel)


def mosaic(image: RgbImage, pattern: CfaPattern) -> CfaImage:
    """Keep only the channels the pattern records at each pixel."""
    rgb = {"R": image.r.data, "G": image.g.data, "B": image.b.data}
    n = pattern.samples_per_pixel
    out = [np.zeros((image.height, image.width)) for _ in range(n)]
    for pos in range(4):
        ys, xs = divmod(pos, 2)
        for slot, ch in enumerate(pattern.color_sets[pos]):
            out[slot][ys::2, xs::2] = rgb[ch][ys::2, xs::2]
    return CfaImage(pattern, tuple(ImagePlane(p) for p in out))


def demosaic_bilinear(cfa: CfaImage) -> RgbImage:
    """Rebuild a full RGB image from recorded samples.

    Missing values are filled by a coverage-normalized 3x3 smoothing of the
    same channel's recorded samples; recorded values pass through exactly.
    """
    h, w = cfa.height, cfa.width
    masks = _channel_masks(cfa.pattern, h, w)
    values = {ch: np.zeros((h, w)) for ch in CHANNELS}
    for pos in range(4):
        ys, xs = divmod(pos, 2)
        for slot, ch in enumerate(cfa.pattern.color_sets[pos]):
            values[ch][ys::2, xs::2] = cfa.planes[slot].data[ys::2, xs::2]
    planes = {}
    for ch in CHANNELS:
        mask = masks[ch].astype(np.float64)
        num = ndimage.convolve(values[ch] * mask, _FILL_KERNEL, mode="constant", cval=0.0)
        den = ndimage.convolve(mask, _FILL_KERNEL, mode="constant", cval=0.0)
        if np.any(den == 0.0):
            raise PatternError(f"channel {ch} has no recorded neighbors somewhere")
        filled = num / den
        # pass-through is explicit: smoothing must never move a recorded sample
        filled[masks[ch]] = values[ch][masks[ch]]
        planes[ch] = ImagePlane(filled)
    return RgbImage(planes["R"], planes["G"], planes["B"])


def reconstruct_cfa(yuv: YuvImage, pattern: CfaPattern, quantize: bool = True) -> CfaImage:
    """Convert a reconstructed YUV image back to recorded sensor samples.

    With ``quantize`` the output is snapped to 8-bit levels, matching what
    a display pipeline would emit; disable it to study the linear map
    alone.
    """
    rgb = yuv_image_to_rgb(yuv)
    raw = mosaic(rgb, pattern)
    if not quantize:
        return raw
    return CfaImage(pattern, tuple(clamp_quantize(p) for p in raw.planes))


def cfa_block_distortion(reference: CfaImage, reconstructed: CfaImage, index: BlockIndex) -> float:
    """Summed squared error over the recorded samples of one 2x2 block."""
    if reference.pattern != reconstructed.pattern:
        raise ComparisonError("CFA images use different patterns")
    if (reference.height, reference.width) != (reconstructed.height, reconstructed.width):
        raise ComparisonError("CFA images differ in geometry")
    block_grid_shape(reference.planes[0])  # validates tiling and index domain below
    total = 0.0
    for ref_plane, rec_plane in zip(reference.planes, reconstructed.planes):
        ref_vals = block_at(ref_plane, index)
        rec_vals = block_at(rec_plane, index)
        for rv, cv in zip(ref_vals, rec_vals):
            total += (rv - cv) * (rv - cv)
    return total
