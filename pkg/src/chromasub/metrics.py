"""Objective quality metrics over 8-bit image data.

PSNR-style scores use a 255 peak. Identical inputs give ``math.inf``;
dataset aggregation excludes those with a warning so means stay finite.
SSIM uses a uniform 8x8 window slid one pixel at a time over all fully
contained positions, with population (biased) moments per window.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .errors import ComparisonError, MetricError
from .geometry import ImagePlane, RgbImage
from .mosaic import CfaImage

PEAK = 255.0

SSIM_WINDOW = 8
SSIM_C1 = (0.01 * PEAK) ** 2
SSIM_C2 = (0.03 * PEAK) ** 2


def _psnr_from_mse(mse: float) -> float:
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / mse)


def _check_same_shape(a, b, what):
    if a.shape != b.shape:
        raise ComparisonError(f"{what} differ in geometry: {a.shape} vs {b.shape}")


def cpsnr(reference: RgbImage, reconstructed: RgbImage) -> float:
    """Composite PSNR over all three channels of an RGB pair."""
    ref = reference.to_array()
    rec = reconstructed.to_array()
    _check_same_shape(ref, rec, "RGB images")
    diff = ref - rec
    return _psnr_from_mse(float(np.mean(diff * diff)))


def psnr_gray(reference: CfaImage, reconstructed: CfaImage) -> float:
    """PSNR over exactly the samples a sensor recorded.

    Every recorded sample counts once, so dual-sample layouts average over
    two values per pixel and full-color layouts over three.
    """
    if reference.pattern != reconstructed.pattern:
        raise ComparisonError("CFA images use different patterns")
    ref = np.concatenate([p.data.ravel() for p in reference.planes])
    rec = np.concatenate([p.data.ravel() for p in reconstructed.planes])
    _check_same_shape(ref, rec, "CFA images")
    diff = ref - rec
    return _psnr_from_mse(float(np.mean(diff * diff)))


def _window_sums(a: np.ndarray, k: int) -> np.ndarray:
    """Sum of every k-by-k window at stride 1, via an integral image."""
    s = np.zeros((a.shape[0] + 1, a.shape[1] + 1))
    np.cumsum(np.cumsum(a, axis=0), axis=1, out=s[1:, 1:])
    return s[k:, k:] - s[:-k, k:] - s[k:, :-k] + s[:-k, :-k]


def ssim(reference: ImagePlane, reconstructed: ImagePlane) -> float:
    """Mean structural similarity between two planes.

    Windows with no variance degrade gracefully: the structure factor
    becomes C2/C2 and only the luminance factor differentiates. The final
    mean is clipped into [-1, 1] to absorb last-bit rounding in the
    variance estimates.
    """
    x = reference.data
    y = reconstructed.data
    _check_same_shape(x, y, "planes")
    k = SSIM_WINDOW
    if x.shape[0] < k or x.shape[1] < k:
        raise MetricError(f"plane {x.shape} too small for a {k}x{k} window")
    n = float(k * k)
    mx = _window_sums(x, k) / n
    my = _window_sums(y, k) / n
    # moments stay raw (no clamping): identical inputs then make the two
    # factors of every window cancel exactly, so a perfect copy scores 1.0
    vx = _window_sums(x * x, k) / n - mx * mx
    vy = _window_sums(y * y, k) / n - my * my
    cxy = _window_sums(x * y, k) / n - mx * my
    num = (2.0 * mx * my + SSIM_C1) * (2.0 * cxy + SSIM_C2)
    den = (mx * mx + my * my + SSIM_C1) * (vx + vy + SSIM_C2)
    return float(min(1.0, max(-1.0, np.mean(num / den))))


def ssim_rgb(reference: RgbImage, reconstructed: RgbImage) -> float:
    """Mean of the per-channel SSIM scores."""
    scores = (
        ssim(reference.r, reconstructed.r),
        ssim(reference.g, reconstructed.g),
        ssim(reference.b, reconstructed.b),
    )
    return sum(scores) / 3.0


def ssim_cfa(reference: CfaImage, reconstructed: CfaImage) -> float:
    """Mean of the per-plane SSIM scores over recorded sample planes."""
    if reference.pattern != reconstructed.pattern:
        raise ComparisonError("CFA images use different patterns")
    scores = [ssim(a, b) for a, b in zip(reference.planes, reconstructed.planes)]
    return sum(scores) / len(scores)


def mean_finite_db(values) -> float | None:
    """Dataset mean of per-image dB scores, excluding infinite entries.

    Returns None when nothing finite remains. Infinite entries mean some
    reconstruction was lossless; they are reported per image but warned
    about and dropped here because a mean over them is meaningless.
    """
    vals = list(values)
    finite = [v for v in vals if math.isfinite(v)]
    dropped = len(vals) - len(finite)
    if dropped:
        warnings.warn(
            f"excluded {dropped} identical-image score(s) from the dataset mean",
            RuntimeWarning,
            stacklevel=2,
        )
    if not finite:
        return None
    return sum(finite) / len(finite)
