"""Grayscale image value type, PGM (P5) I/O, pair enumeration and LSB prefix access."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bit_io import BitStream, as_bit_array
from .errors import MalformedHeader, RegionTooLarge, TruncatedData, UnsupportedMaxval


class GrayImage:
    """Immutable H x W grid of 8-bit intensities.

    Pixels are held as a read-only ``uint8`` array; equality is by value.
    """

    __slots__ = ("_px",)

    def __init__(self, pixels):
        arr = np.asarray(pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2-D array, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("intensities must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        arr = np.array(arr, dtype=np.uint8, copy=True)
        arr.flags.writeable = False
        self._px = arr

    @classmethod
    def from_flat(cls, height: int, width: int, values) -> "GrayImage":
        return cls(np.asarray(values).reshape(height, width))

    @property
    def pixels(self) -> np.ndarray:
        return self._px

    @property
    def height(self) -> int:
        return self._px.shape[0]

    @property
    def width(self) -> int:
        return self._px.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._px.shape

    @property
    def size(self) -> int:
        return self._px.size

    def flat(self) -> np.ndarray:
        """Row-major pixel vector as a writable ``int16`` copy (room for +/-1 arithmetic)."""
        return self._px.astype(np.int16).ravel()

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._px, other._px))

    def __hash__(self):
        return hash((self.shape, self._px.tobytes()))

    def __repr__(self):
        return f"GrayImage({self.height}x{self.width})"


def _from_flat_checked(shape, flat: np.ndarray) -> GrayImage:
    if flat.min(initial=0) < 0 or flat.max(initial=0) > 255:
        raise AssertionError("pixel left the [0, 255] range")
    return GrayImage(flat.reshape(shape).astype(np.uint8))


# ---- PGM ----

_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def decode_pgm(data: bytes) -> GrayImage:
    if not data.startswith(b"P5"):
        raise MalformedHeader("missing P5 magic")
    pos = 2
    fields = []
    for _ in range(3):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise MalformedHeader("header ended early")
        tok = m.group(1)
        if not tok.isdigit():
            raise MalformedHeader(f"non-numeric header field {tok!r}")
        fields.append(int(tok))
        pos = m.end()
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise MalformedHeader("zero image dimension")
    if maxval != 255:
        raise UnsupportedMaxval(f"maxval {maxval} (only 255 supported)")
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise MalformedHeader("missing whitespace after maxval")
    pos += 1
    n = width * height
    body = data[pos:pos + n]
    if len(body) < n:
        raise TruncatedData(f"expected {n} pixel bytes, got {len(body)}")
    return GrayImage(np.frombuffer(body, dtype=np.uint8).reshape(height, width))


def encode_pgm(img: GrayImage) -> bytes:
    return f"P5\n{img.width} {img.height}\n255\n".encode("ascii") + img.pixels.tobytes()


def read_pgm(path) -> GrayImage:
    with open(path, "rb") as fh:
        return decode_pgm(fh.read())


def write_pgm(path, img: GrayImage) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_pgm(img))


# ---- pair enumeration ----

@dataclass(frozen=True)
class HPairRef:
    row: int
    col_left: int
    ordinal: int

    @property
    def x_pos(self):
        return (self.row, self.col_left)

    @property
    def y_pos(self):
        return (self.row, self.col_left + 1)


@dataclass(frozen=True)
class VPairRef:
    col: int
    row_top: int
    ordinal: int

    @property
    def u_pos(self):
        return (self.row_top, self.col)

    @property
    def v_pos(self):
        return (self.row_top + 1, self.col)


def horizontal_pairs(img: GrayImage) -> list[HPairRef]:
    h, w = img.shape
    half = w // 2
    return [HPairRef(i, 2 * j, i * half + j) for i in range(h) for j in range(half)]


def vertical_pairs(img: GrayImage) -> list[VPairRef]:
    h, w = img.shape
    half = h // 2
    return [VPairRef(c, 2 * k, c * half + k) for c in range(w) for k in range(half)]


@dataclass(frozen=True, eq=False)
class PairLayout:
    """Flat pixel indices of every pair in scan order, as used by the stage engine.

    ``first[p]`` is x (resp. u), ``second[p]`` is y (resp. v) of pair ordinal p.
    ``map_shape`` is the location-map shape; ``unpaired`` lists pixels in no pair.
    """

    first: np.ndarray
    second: np.ndarray
    unpaired: np.ndarray
    map_shape: tuple[int, int]
    n_pixels: int
    column_major: bool = False

    @property
    def n_pairs(self) -> int:
        return len(self.first)


@lru_cache(maxsize=64)
def horizontal_layout(h: int, w: int) -> PairLayout:
    half = w // 2
    rows = np.repeat(np.arange(h), half)
    cols = np.tile(np.arange(half) * 2, h)
    first = rows * w + cols
    unpaired = np.arange(h) * w + (w - 1) if w % 2 else np.empty(0, dtype=np.int64)
    return _frozen_layout(first, first + 1, unpaired, (h, half), h * w)


@lru_cache(maxsize=64)
def vertical_layout(h: int, w: int) -> PairLayout:
    half = h // 2
    cols = np.repeat(np.arange(w), half)
    rows = np.tile(np.arange(half) * 2, w)
    first = rows * w + cols
    unpaired = (h - 1) * w + np.arange(w) if h % 2 else np.empty(0, dtype=np.int64)
    return _frozen_layout(first, first + w, unpaired, (half, w), h * w, column_major=True)


def _frozen_layout(first, second, unpaired, shape, n, column_major=False) -> PairLayout:
    arrs = [np.ascontiguousarray(a, dtype=np.int64) for a in (first, second, unpaired)]
    for a in arrs:
        a.flags.writeable = False
    return PairLayout(*arrs, map_shape=shape, n_pixels=n, column_major=column_major)


# ---- LSB prefix ----

def read_lsb_prefix(img: GrayImage, n: int):
    """LSBs of the first ``n`` row-major pixels as a BitStream."""
    if n < 0 or n > img.size:
        raise RegionTooLarge(f"prefix of {n} pixels exceeds {img.size}")
    return BitStream(img.pixels.ravel()[:n] & 1)


def write_lsb_prefix(img: GrayImage, bits) -> GrayImage:
    b = as_bit_array(bits)
    if len(b) > img.size:
        raise RegionTooLarge(f"{len(b)} bits exceed {img.size} pixels")
    flat = img.pixels.ravel().copy()
    flat[: len(b)] = (flat[: len(b)] & 0xFE) | b
    return GrayImage(flat.reshape(img.shape))
