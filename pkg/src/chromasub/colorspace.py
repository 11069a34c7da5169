"""Limited-range BT.601 conversion between 8-bit RGB and YUV.

Both directions are plain affine maps with no clamping or rounding inside:
downstream error analysis relies on the conversions being exactly linear.
Snapping values back to the integer range [0, 255] is a separate explicit
step (``clamp_quantize`` / ``quantize_sample``).
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import ImagePlane, RgbImage, YuvImage

RGB_TO_YUV_MATRIX = np.array(
    [
        [0.257, 0.504, 0.098],
        [-0.148, -0.291, 0.439],
        [0.439, -0.368, -0.071],
    ]
)

RGB_TO_YUV_OFFSET = np.array([16.0, 128.0, 128.0])

YUV_TO_RGB_MATRIX = np.array(
    [
        [1.164, 0.0, 1.596],
        [1.164, -0.391, -0.813],
        [1.164, 2.018, 0.0],
    ]
)


def rgb_to_yuv(rgb: tuple[float, float, float]) -> tuple[float, float, float]:
    """Convert one RGB triple to (Y, U, V), unclamped."""
    r, g, b = rgb
    y = 0.257 * r + 0.504 * g + 0.098 * b + 16.0
    u = -0.148 * r - 0.291 * g + 0.439 * b + 128.0
    v = 0.439 * r - 0.368 * g - 0.071 * b + 128.0
    return (y, u, v)


def yuv_to_rgb(yuv: tuple[float, float, float]) -> tuple[float, float, float]:
    """Convert one (Y, U, V) triple back to RGB, unclamped."""
    y, u, v = yuv
    yc = y - 16.0
    uc = u - 128.0
    vc = v - 128.0
    r = 1.164 * yc + 1.596 * vc
    g = 1.164 * yc - 0.391 * uc - 0.813 * vc
    b = 1.164 * yc + 2.018 * uc
    return (r, g, b)


def rgb_image_to_yuv(image: RgbImage) -> YuvImage:
    stacked = image.to_array()
    out = np.tensordot(stacked, RGB_TO_YUV_MATRIX.T, axes=1) + RGB_TO_YUV_OFFSET
    return YuvImage(ImagePlane(out[:, :, 0]), ImagePlane(out[:, :, 1]), ImagePlane(out[:, :, 2]))


def yuv_image_to_rgb(image: YuvImage) -> RgbImage:
    stacked = np.stack([image.y.data, image.u.data, image.v.data], axis=2)
    centered = stacked - RGB_TO_YUV_OFFSET
    out = np.tensordot(centered, YUV_TO_RGB_MATRIX.T, axes=1)
    return RgbImage(ImagePlane(out[:, :, 0]), ImagePlane(out[:, :, 1]), ImagePlane(out[:, :, 2]))


def quantize_sample(x: float) -> int:
    """Round half away from zero, then clamp to [0, 255].

    127.5 rounds to 128 and 126.5 to 127; numpy's round would send both
    halves to the nearest even value instead.
    """
    rounded = math.floor(abs(x) + 0.5)
    if x < 0.0:
        rounded = -rounded
    return min(255, max(0, rounded))


def clamp_quantize(plane: ImagePlane) -> ImagePlane:
    """Apply quantize_sample to every sample of a plane."""
    a = plane.data
    rounded = np.copysign(np.floor(np.abs(a) + 0.5), a)
    return ImagePlane(np.clip(rounded, 0.0, 255.0))


def clamp_quantize_rgb(image: RgbImage) -> RgbImage:
    return RgbImage(clamp_quantize(image.r), clamp_quantize(image.g), clamp_quantize(image.b))
