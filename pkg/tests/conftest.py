"""Shared fixtures and random-data factories for the test suite."""

import numpy as np
import pytest

from chromasub import BlockContext, NeighborChroma, RgbImage
from chromasub.patterns import pattern_for


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)


def random_block_context(rng, pattern, lo=0.0, hi=255.0):
    """A block context with uniformly random chroma values everywhere."""
    vals = rng.uniform(lo, hi, size=28)
    yuv_block = tuple(
        (float(vals[3 * i]), float(vals[3 * i + 1]), float(vals[3 * i + 2])) for i in range(4)
    )
    pairs = [(float(vals[12 + 2 * k]), float(vals[13 + 2 * k])) for k in range(8)]
    return BlockContext(pattern=pattern, yuv_block=yuv_block, neighbors=NeighborChroma(*pairs))


def random_rgb_image(rng, width, height):
    """Integer-valued random RGB image, like decoded 8-bit content."""
    arr = rng.integers(0, 256, size=(height, width, 3)).astype(np.float64)
    return RgbImage.from_array(arr)


def _center_crop(arr, size):
    h, w = arr.shape[:2]
    y0, x0 = (h - size) // 2, (w - size) // 2
    return arr[y0 : y0 + size, x0 : x0 + size]


@pytest.fixture(scope="session")
def natural_images():
    """Three photographic test images, center-cropped to 256x256."""
    from skimage import data

    return [
        ("astronaut", RgbImage.from_array(_center_crop(data.astronaut(), 256).astype(np.float64))),
        ("coffee", RgbImage.from_array(_center_crop(data.coffee(), 256).astype(np.float64))),
        ("chelsea", RgbImage.from_array(_center_crop(data.chelsea(), 256).astype(np.float64))),
    ]


@pytest.fixture(scope="session")
def canonical_patterns():
    """One pattern per sensor kind."""
    return (
        pattern_for("rgb"),
        pattern_for("bayer", "a"),
        pattern_for("dtdi", "a"),
    )
