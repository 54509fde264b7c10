"""Mirror-symmetric inkblot rasters, bit-reproducible from a seed.

An inkblot is built from three passes of random ellipse pairs:
150 pairs at 60x60, 70 at 20x20, 150 at 60x20, in that order.  Each pair
is one ellipse rasterized on the left half of the canvas plus its exact
pixel mirror on the right half, so symmetry holds bit-for-bit regardless
of rounding inside the rasterizer.

Canvas, palette, per-ellipse stream layout and the PNG encoding are all
protocol constants (FORMATS.md); the same seed must reproduce the same
PNG bytes on any platform.
"""

from __future__ import annotations

import math
import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .seedcore import IMAGE_STREAM_LABEL, RandomStream, Seed, stream_from

CANVAS_WIDTH = 400
CANVAS_HEIGHT = 400
BACKGROUND = (255, 255, 255)

# (count, width, height) per layer pass, drawn in this order.
LAYER_PASSES = ((150, 60, 60), (70, 20, 20), (150, 60, 20))

# 12 ink colors; drawn uniformly per ellipse pair.
PALETTE = (
    (0, 0, 0),        # black
    (25, 25, 112),    # midnight blue
    (70, 130, 180),   # steel blue
    (0, 128, 128),    # teal
    (0, 100, 0),      # dark green
    (85, 107, 47),    # dark olive
    (128, 0, 0),      # maroon
    (178, 34, 34),    # firebrick
    (210, 105, 30),   # chocolate
    (75, 0, 130),     # indigo
    (139, 69, 19),    # saddle brown
    (47, 79, 79),     # dark slate gray
)


@dataclass(frozen=True)
class EllipseSpec:
    """One left-half ellipse; its mirror partner is implied."""

    center: tuple[int, int]
    axes: tuple[int, int]
    angle: float
    color: tuple[int, int, int]


class InkblotImage:
    """Row-major RGB raster with an index j in 1..k."""

    def __init__(self, width: int, height: int, pixels: np.ndarray | None = None, index: int = 1):
        if pixels is None:
            pixels = np.empty((height, width, 3), dtype=np.uint8)
            pixels[:, :] = BACKGROUND
        if pixels.shape != (height, width, 3) or pixels.dtype != np.uint8:
            raise ValidationError("pixels must be a uint8 array of shape (height, width, 3)")
        self.width = width
        self.height = height
        self.pixels = pixels
        self.index = index

    @classmethod
    def blank(cls, width: int = CANVAS_WIDTH, height: int = CANVAS_HEIGHT, index: int = 1) -> "InkblotImage":
        px = np.empty((height, width, 3), dtype=np.uint8)
        px[:, :] = BACKGROUND
        return cls(width, height, px, index)

    def __eq__(self, other) -> bool:
        if not isinstance(other, InkblotImage):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and np.array_equal(self.pixels, other.pixels)
        )

    __hash__ = None

    def is_mirror_symmetric(self) -> bool:
        """pixel(x, y) == pixel(width-1-x, y) everywhere."""
        return bool(np.array_equal(self.pixels, self.pixels[:, ::-1, :]))


def _paint_pair_numpy(pixels, cx, cy, inv_a2, inv_b2, cos_t, sin_t, x0, x1, y0, y1):
    """Coverage mask for the left-half ellipse; mirrored onto the right."""
    xs = np.arange(x0, x1 + 1, dtype=np.float64) - cx
    ys = np.arange(y0, y1 + 1, dtype=np.float64) - cy
    u = xs[None, :] * cos_t + ys[:, None] * sin_t
    v = ys[:, None] * cos_t - xs[None, :] * sin_t
    return (u * u) * inv_a2 + (v * v) * inv_b2 <= 1.0


try:  # optional accelerator; byte-identical to the numpy path
    from numba import njit as _njit

    @_njit(cache=True)
    def _paint_pair_jit(pixels, cx, cy, inv_a2, inv_b2, cos_t, sin_t,
                        x0, x1, y0, y1, red, green, blue, width):  # pragma: no cover
        for y in range(y0, y1 + 1):
            dy = float(y - cy)
            for x in range(x0, x1 + 1):
                dx = float(x - cx)
                u = dx * cos_t + dy * sin_t
                v = dy * cos_t - dx * sin_t
                if (u * u) * inv_a2 + (v * v) * inv_b2 <= 1.0:
                    mx = width - 1 - x
                    pixels[y, x, 0] = red
                    pixels[y, x, 1] = green
                    pixels[y, x, 2] = blue
                    pixels[y, mx, 0] = red
                    pixels[y, mx, 1] = green
                    pixels[y, mx, 2] = blue

except ImportError:  # pragma: no cover
    _paint_pair_jit = None


def _draw_pair(pixels: np.ndarray, spec: EllipseSpec, use_jit: bool = True) -> None:
    """Rasterize spec clipped to the left half, then its pixel mirror.

    A pixel (x, y) is inside when, with (u, v) the offset from the center
    rotated into the ellipse frame, (u/a)^2 + (v/b)^2 <= 1; the mirror
    partner is the exact column reflection x -> width-1-x, so each pair
    leaves the canvas bit-exactly symmetric.
    """
    height, width = pixels.shape[:2]
    half = width // 2
    cx, cy = spec.center
    a = spec.axes[0] / 2.0
    b = spec.axes[1] / 2.0
    r = int(math.ceil(max(a, b)))

    x0 = max(0, cx - r)
    x1 = min(half - 1, cx + r)
    y0 = max(0, cy - r)
    y1 = min(height - 1, cy + r)
    if x0 > x1 or y0 > y1:
        return

    cos_t = math.cos(spec.angle)
    sin_t = math.sin(spec.angle)
    inv_a2 = 1.0 / (a * a)
    inv_b2 = 1.0 / (b * b)
    if use_jit and _paint_pair_jit is not None:
        _paint_pair_jit(pixels, cx, cy, inv_a2, inv_b2, cos_t, sin_t,
                        x0, x1, y0, y1, *spec.color, width)
        return
    mask = _paint_pair_numpy(pixels, cx, cy, inv_a2, inv_b2, cos_t, sin_t, x0, x1, y0, y1)
    color = np.asarray(spec.color, dtype=np.uint8)
    pixels[y0 : y1 + 1, x0 : x1 + 1][mask] = color
    pixels[y0 : y1 + 1, width - 1 - x1 : width - x0][mask[:, ::-1]] = color


def draw_random_ellipse_pairs(
    image: InkblotImage, stream: RandomStream, t: int, w: int, h: int
) -> InkblotImage:
    """Draw t mirrored ellipse pairs of size (w, h) onto image, in place.

    Stream layout per pair (4 draws, 8 bytes each): center x in the left
    half, center y, rotation angle, palette index.
    """
    if t < 0:
        raise ValidationError("pair count must be non-negative")
    if w > image.width or h > image.height:
        raise ValidationError(f"ellipse {w}x{h} exceeds canvas {image.width}x{image.height}")
    half = image.width // 2
    for _ in range(t):
        cx = stream.draw_uniform(half)
        cy = stream.draw_uniform(image.height)
        angle = stream.draw_angle()
        color = stream.draw_color(PALETTE)
        _draw_pair(image.pixels, EllipseSpec((cx, cy), (w, h), angle, color))
    return image


def generate_inkblot_images(k: int, seed: Seed) -> list[InkblotImage]:
    """k inkblots from one seed; image j is independent of k for j <= k.

    All passes consume a single image-labelled stream sequentially, so the
    whole batch is a pure function of (k, seed).
    """
    if k < 1:
        raise ValidationError("k must be at least 1")
    stream = stream_from(seed, IMAGE_STREAM_LABEL)
    images = []
    for j in range(1, k + 1):
        img = InkblotImage.blank(index=j)
        for count, w, h in LAYER_PASSES:
            draw_random_ellipse_pairs(img, stream, count, w, h)
        images.append(img)
    return images


# --- PNG codec ------------------------------------------------------------
#
# Hand-rolled so the byte stream is pinned: 8-bit truecolor, no interlace,
# every scanline filter 0, zlib level 9.  Decode accepts any of the five
# standard filters so third-party PNGs of the right shape also load.

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def _chunk(kind: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + kind
        + payload
        + struct.pack(">I", zlib.crc32(kind + payload) & 0xFFFFFFFF)
    )


def export_png(image: InkblotImage) -> bytes:
    """Lossless PNG bytes; decode_png(export_png(img)) == img.pixels."""
    ihdr = struct.pack(">IIBBBBB", image.width, image.height, 8, 2, 0, 0, 0)
    raw = bytearray()
    for row in image.pixels:
        raw.append(0)
        raw.extend(row.tobytes())
    idat = zlib.compress(bytes(raw), 9)
    return _PNG_SIGNATURE + _chunk(b"IHDR", ihdr) + _chunk(b"IDAT", idat) + _chunk(b"IEND", b"")


def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    if pb <= pc:
        return b
    return c


def decode_png(data: bytes) -> np.ndarray:
    """Parse an 8-bit RGB PNG back into a (height, width, 3) uint8 array."""
    if data[:8] != _PNG_SIGNATURE:
        raise ValidationError("not a PNG byte string")
    pos = 8
    width = height = None
    idat = bytearray()
    while pos < len(data):
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        kind = data[pos + 4 : pos + 8]
        payload = data[pos + 8 : pos + 8 + length]
        pos += 12 + length
        if kind == b"IHDR":
            width, height, depth, color, _, _, interlace = struct.unpack(">IIBBBBB", payload)
            if depth != 8 or color != 2 or interlace != 0:
                raise ValidationError("only 8-bit non-interlaced RGB PNGs are supported")
        elif kind == b"IDAT":
            idat.extend(payload)
        elif kind == b"IEND":
            break
    if width is None:
        raise ValidationError("PNG missing IHDR")
    raw = zlib.decompress(bytes(idat))
    stride = width * 3
    out = np.empty((height, width, 3), dtype=np.uint8)
    prev = bytearray(stride)
    pos = 0
    for y in range(height):
        filter_type = raw[pos]
        line = bytearray(raw[pos + 1 : pos + 1 + stride])
        pos += 1 + stride
        if filter_type == 1:  # Sub
            for i in range(3, stride):
                line[i] = (line[i] + line[i - 3]) & 0xFF
        elif filter_type == 2:  # Up
            for i in range(stride):
                line[i] = (line[i] + prev[i]) & 0xFF
        elif filter_type == 3:  # Average
            for i in range(stride):
                left = line[i - 3] if i >= 3 else 0
                line[i] = (line[i] + (left + prev[i]) // 2) & 0xFF
        elif filter_type == 4:  # Paeth
            for i in range(stride):
                left = line[i - 3] if i >= 3 else 0
                upleft = prev[i - 3] if i >= 3 else 0
                line[i] = (line[i] + _paeth(left, prev[i], upleft)) & 0xFF
        elif filter_type != 0:
            raise ValidationError(f"unknown PNG filter type {filter_type}")
        out[y] = np.frombuffer(bytes(line), dtype=np.uint8).reshape(width, 3)
        prev = line
    return out
