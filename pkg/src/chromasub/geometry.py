"""Image containers and 2x2 block addressing.

Sample data lives in read-only float64 arrays with row-major (height, width)
layout. Values nominally span [0, 255] but are kept at full precision;
rounding to integers happens only at explicit quantization points, never
implicitly inside a container.

Blocks are the non-overlapping 2x2 pixel tiles of a full-resolution image.
Within a block, positions are numbered in zigzag order: top-left, top-right,
bottom-left, bottom-right.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .errors import GeometryError


class BlockIndex(NamedTuple):
    """Coordinates of one 2x2 block; pixel coordinates are (2*bx, 2*by)."""

    bx: int
    by: int


@dataclass(frozen=True, eq=False)
class ImagePlane:
    """A single channel held as an immutable 2-D float64 grid."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise GeometryError(f"plane must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise GeometryError(f"plane must be non-empty, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise GeometryError("plane contains non-finite samples")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @classmethod
    def full(cls, width: int, height: int, value: float) -> "ImagePlane":
        """Build a constant plane of the given size."""
        return cls(np.full((height, width), float(value)))

    def __repr__(self):
        return f"ImagePlane({self.width}x{self.height})"


def _require_same_geometry(planes, what):
    shapes = {p.data.shape for p in planes}
    if len(shapes) != 1:
        raise GeometryError(f"{what} planes disagree on shape: {sorted(shapes)}")


def require_even(plane: ImagePlane, what: str):
    if plane.width % 2 or plane.height % 2:
        raise GeometryError(
            f"{what} needs even dimensions for 2x2 tiling, got {plane.width}x{plane.height}"
        )


@dataclass(frozen=True, eq=False)
class RgbImage:
    """Full-resolution RGB image with even dimensions."""

    r: ImagePlane
    g: ImagePlane
    b: ImagePlane

    def __post_init__(self):
        _require_same_geometry((self.r, self.g, self.b), "RGB")
        require_even(self.r, "RgbImage")

    @property
    def width(self) -> int:
        return self.r.width

    @property
    def height(self) -> int:
        return self.r.height

    @classmethod
    def from_array(cls, arr) -> "RgbImage":
        """Build from an (H, W, 3) array."""
        a = np.asarray(arr, dtype=np.float64)
        if a.ndim != 3 or a.shape[2] != 3:
            raise GeometryError(f"expected (H, W, 3) array, got shape {a.shape}")
        return cls(ImagePlane(a[:, :, 0]), ImagePlane(a[:, :, 1]), ImagePlane(a[:, :, 2]))

    def to_array(self) -> np.ndarray:
        return np.stack([self.r.data, self.g.data, self.b.data], axis=2)


@dataclass(frozen=True, eq=False)
class YuvImage:
    """Full-resolution YUV image with even dimensions."""

    y: ImagePlane
    u: ImagePlane
    v: ImagePlane

    def __post_init__(self):
        _require_same_geometry((self.y, self.u, self.v), "YUV")
        require_even(self.y, "YuvImage")

    @property
    def width(self) -> int:
        return self.y.width

    @property
    def height(self) -> int:
        return self.y.height


@dataclass(frozen=True, eq=False)
class SubsampledChromaImage:
    """One chroma pair per 2x2 block: two half-resolution planes."""

    u_s: ImagePlane
    v_s: ImagePlane

    def __post_init__(self):
        _require_same_geometry((self.u_s, self.v_s), "subsampled chroma")

    @property
    def width(self) -> int:
        return self.u_s.width

    @property
    def height(self) -> int:
        return self.u_s.height


def block_grid_shape(plane: ImagePlane) -> tuple[int, int]:
    """Number of 2x2 blocks along each axis as (blocks_x, blocks_y)."""
    require_even(plane, "block tiling")
    return plane.width // 2, plane.height // 2


def block_at(plane: ImagePlane, index: BlockIndex) -> tuple[float, float, float, float]:
    """The four samples of one block in zigzag order.

    Raises GeometryError when the plane has odd dimensions or the index
    falls outside the block grid.
    """
    bw, bh = block_grid_shape(plane)
    bx, by = index
    if not (0 <= bx < bw and 0 <= by < bh):
        raise GeometryError(f"block {index} outside grid {bw}x{bh}")
    d = plane.data
    y, x = 2 * by, 2 * bx
    return (float(d[y, x]), float(d[y, x + 1]), float(d[y + 1, x]), float(d[y + 1, x + 1]))


def iter_block_indices(plane: ImagePlane) -> Iterator[BlockIndex]:
    """All block indices in row-major order (left to right, top to bottom)."""
    bw, bh = block_grid_shape(plane)
    for by in range(bh):
        for bx in range(bw):
            yield BlockIndex(bx, by)
