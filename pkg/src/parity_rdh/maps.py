"""Location maps of embeddable pairs and their compressed form."""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from . import arith
from .bit_io import LENGTH_FIELD_BITS, as_bit_array, bits_to_uint, uint_to_bits
from .errors import CorruptMapStream
from .image_core import GrayImage, horizontal_layout, vertical_layout


class LocationMap:
    """rows x cols one-bit map stored in pair scan order.

    For the horizontal map scan order is row-major; for the vertical map it is
    column-major (pair ordinal = col * rows + pair_row). ``column_major`` records
    which, so :meth:`as_grid` can lay the entries out as ``[pair_row][col]``.
    """

    __slots__ = ("rows", "cols", "bits", "column_major")

    def __init__(self, rows: int, cols: int, bits, column_major: bool = False):
        b = np.array(as_bit_array(bits), dtype=np.uint8)
        if len(b) != rows * cols:
            raise ValueError(f"{len(b)} entries for a {rows}x{cols} map")
        b.flags.writeable = False
        self.rows, self.cols, self.bits, self.column_major = rows, cols, b, column_major

    def as_grid(self) -> np.ndarray:
        if self.column_major:
            return self.bits.reshape(self.cols, self.rows).T
        return self.bits.reshape(self.rows, self.cols)

    @property
    def ones(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other):
        if not isinstance(other, LocationMap):
            return NotImplemented
        return ((self.rows, self.cols) == (other.rows, other.cols)
                and np.array_equal(self.bits, other.bits))

    def __repr__(self):
        return f"LocationMap({self.rows}x{self.cols}, ones={self.ones})"


@dataclass(frozen=True, eq=False)
class CompressedMap:
    """32-bit big-endian body length followed by the arithmetic-coded body."""

    body: np.ndarray

    @property
    def header_value(self) -> int:
        return len(self.body)

    def __len__(self):
        # LC: total bits occupied in the carrier, header included
        return LENGTH_FIELD_BITS + len(self.body)

    def to_bits(self) -> np.ndarray:
        return np.concatenate([uint_to_bits(len(self.body), LENGTH_FIELD_BITS), self.body])

    @classmethod
    def from_bits(cls, bits) -> "CompressedMap":
        b = as_bit_array(bits)
        if len(b) < LENGTH_FIELD_BITS:
            raise CorruptMapStream("compressed map shorter than its header")
        n = bits_to_uint(b[:LENGTH_FIELD_BITS])
        if LENGTH_FIELD_BITS + n > len(b):
            raise CorruptMapStream(f"header claims {n} body bits, {len(b) - 32} present")
        return cls(np.array(b[LENGTH_FIELD_BITS:LENGTH_FIELD_BITS + n], dtype=np.uint8))

    def to_blob(self) -> bytes:
        """Header as 4 bytes, then the body packed MSB-first and zero-padded."""
        return struct.pack(">I", len(self.body)) + np.packbits(self.body).tobytes()

    @classmethod
    def read_blob(cls, data: bytes, offset: int = 0) -> tuple["CompressedMap", int]:
        """Parse one blob at ``offset``; returns the map and the offset after it."""
        if offset + 4 > len(data):
            raise CorruptMapStream("truncated compressed-map header")
        (n,) = struct.unpack_from(">I", data, offset)
        nbytes = (n + 7) // 8
        start = offset + 4
        if start + nbytes > len(data):
            raise CorruptMapStream(f"truncated compressed-map body ({n} bits declared)")
        raw = np.frombuffer(data, dtype=np.uint8, count=nbytes, offset=start)
        return cls(np.unpackbits(raw)[:n].copy()), start + nbytes

    def __eq__(self, other):
        return isinstance(other, CompressedMap) and np.array_equal(self.body, other.body)


def build_horizontal_map(img: GrayImage) -> LocationMap:
    lay = horizontal_layout(*img.shape)
    flat = img.pixels.ravel()
    return LocationMap(*lay.map_shape, flat[lay.second] & 1)


def build_vertical_map(img: GrayImage) -> LocationMap:
    lay = vertical_layout(*img.shape)
    flat = img.pixels.ravel()
    return LocationMap(*lay.map_shape, 1 - (flat[lay.second] & 1), column_major=True)


def compress_map(lmap: LocationMap) -> CompressedMap:
    return CompressedMap(arith.encode_bits(lmap.bits))


def decompress_map(cm: CompressedMap, rows: int, cols: int,
                   column_major: bool = False) -> LocationMap:
    return LocationMap(rows, cols, arith.decode_bits(cm.body, rows * cols), column_major)
