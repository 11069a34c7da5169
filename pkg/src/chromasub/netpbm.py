"""Binary netpbm image files (P6 color, P5 grayscale) and CFA bundles.

Only maxval 255 is supported. Readers accept arbitrary whitespace and
``#`` comments in headers; writers emit a canonical minimal header so
identical data always produces identical bytes.

A CFA bundle is a JSON sidecar describing the pattern plus one P5 file
per recorded sample slot.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .colorspace import clamp_quantize
from .errors import GeometryError
from .geometry import ImagePlane, RgbImage
from .mosaic import CfaImage
from .patterns import pattern_for


def _read_header(data: bytes, magic: bytes) -> tuple[int, int, int]:
    """Parse 'magic width height maxval' allowing comments, return (w, h, offset)."""
    if not data.startswith(magic):
        raise GeometryError(f"expected {magic.decode()} file, got {data[:2]!r}")
    pos = len(magic)
    fields = []
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise GeometryError("truncated netpbm header")
        fields.append(int(data[start:pos]))
    pos += 1  # single whitespace byte separates header from raster
    width, height, maxval = fields
    if maxval != 255:
        raise GeometryError(f"only maxval 255 is supported, got {maxval}")
    if width < 1 or height < 1:
        raise GeometryError(f"bad dimensions {width}x{height}")
    return width, height, pos


def _read_raster(path, magic: bytes, channels: int) -> np.ndarray:
    data = Path(path).read_bytes()
    width, height, offset = _read_header(data, magic)
    expected = width * height * channels
    raster = data[offset : offset + expected]
    if len(raster) != expected:
        raise GeometryError(f"raster holds {len(raster)} bytes, expected {expected}")
    arr = np.frombuffer(raster, dtype=np.uint8).astype(np.float64)
    if channels == 1:
        return arr.reshape(height, width)
    return arr.reshape(height, width, channels)


def read_ppm(path) -> RgbImage:
    return RgbImage.from_array(_read_raster(path, b"P6", 3))


def read_pgm(path) -> ImagePlane:
    return ImagePlane(_read_raster(path, b"P5", 1))


def _to_bytes(plane: ImagePlane) -> np.ndarray:
    # writers quantize defensively so real-valued planes serialize sanely
    return clamp_quantize(plane).data.astype(np.uint8)


def write_ppm(path, image: RgbImage) -> None:
    raster = np.stack([_to_bytes(image.r), _to_bytes(image.g), _to_bytes(image.b)], axis=2)
    header = f"P6\n{image.width} {image.height}\n255\n".encode()
    Path(path).write_bytes(header + raster.tobytes())


def write_pgm(path, plane: ImagePlane) -> None:
    header = f"P5\n{plane.width} {plane.height}\n255\n".encode()
    Path(path).write_bytes(header + _to_bytes(plane).tobytes())


def save_cfa(base_path, cfa: CfaImage) -> Path:
    """Write a CFA bundle; returns the sidecar path.

    ``base_path`` is used as a prefix: <base>.json plus <base>.s<k>.pgm
    for each sample slot.
    """
    base = Path(base_path)
    plane_names = []
    for k, plane in enumerate(cfa.planes):
        name = f"{base.name}.s{k}.pgm"
        write_pgm(base.with_name(name), plane)
        plane_names.append(name)
    sidecar = {
        "kind": cfa.pattern.kind.value,
        "variant": cfa.pattern.variant,
        "width": cfa.width,
        "height": cfa.height,
        "planes": plane_names,
    }
    out = base.with_name(base.name + ".json")
    out.write_text(json.dumps(sidecar, indent=2) + "\n")
    return out


def load_cfa(sidecar_path) -> CfaImage:
    """Read a CFA bundle back; validates pattern, geometry, and plane count."""
    sidecar_path = Path(sidecar_path)
    meta = json.loads(sidecar_path.read_text())
    pattern = pattern_for(meta["kind"], meta["variant"])
    planes = []
    for name in meta["planes"]:
        plane = read_pgm(sidecar_path.with_name(name))
        if (plane.width, plane.height) != (meta["width"], meta["height"]):
            raise GeometryError(
                f"plane {name} is {plane.width}x{plane.height}, "
                f"sidecar says {meta['width']}x{meta['height']}"
            )
        planes.append(plane)
    return CfaImage(pattern, tuple(planes))
