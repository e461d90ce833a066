"""Bit sequences and the length-prefixed payload envelope."""

from __future__ import annotations

import numpy as np

from .errors import LengthNotByteAligned, PayloadTooLarge, SecretExhausted, TruncatedEnvelope

LENGTH_FIELD_BITS = 32
MAX_PAYLOAD_BYTES = 1 << 29


def as_bit_array(bits) -> np.ndarray:
    """Coerce a BitStream, array or iterable of 0/1 into a ``uint8`` vector."""
    if isinstance(bits, BitStream):
        return bits.bits
    arr = np.asarray(bits, dtype=np.uint8).ravel()
    if arr.size and arr.max() > 1:
        raise ValueError("bits must be 0 or 1")
    return arr


class BitStream:
    """Ordered bits with a read cursor.

    Reads advance the cursor; appends never move it.
    """

    def __init__(self, bits=()):
        self._bits = np.array(as_bit_array(bits), dtype=np.uint8)
        self.cursor = 0

    @classmethod
    def zeros(cls, n: int) -> "BitStream":
        return cls(np.zeros(n, dtype=np.uint8))

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    def __len__(self):
        return len(self._bits)

    def __iter__(self):
        return iter(self._bits.tolist())

    def __eq__(self, other):
        if isinstance(other, BitStream):
            other = other.bits
        try:
            other = as_bit_array(other)
        except (TypeError, ValueError):
            return NotImplemented
        return bool(np.array_equal(self._bits, other))

    def __repr__(self):
        head = "".join(map(str, self._bits[:32].tolist()))
        more = "..." if len(self) > 32 else ""
        return f"BitStream({head}{more}, len={len(self)}, cursor={self.cursor})"

    @property
    def remaining(self) -> int:
        return len(self._bits) - self.cursor

    def read(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("negative read")
        if n > self.remaining:
            raise SecretExhausted(f"need {n} bits, {self.remaining} left")
        out = self._bits[self.cursor:self.cursor + n]
        self.cursor += n
        return out

    def read_uint(self, nbits: int) -> int:
        return bits_to_uint(self.read(nbits))

    def append(self, bits) -> None:
        self._bits = np.concatenate([self._bits, as_bit_array(bits)])

    def to_bytes(self) -> bytes:
        """Pack all bits MSB-first, zero-padding the final byte."""
        return np.packbits(self._bits).tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, nbits: int | None = None) -> "BitStream":
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
        return cls(bits if nbits is None else bits[:nbits])


def uint_to_bits(value: int, nbits: int) -> np.ndarray:
    if value < 0 or value >= 1 << nbits:
        raise ValueError(f"{value} does not fit in {nbits} bits")
    return np.array([(value >> (nbits - 1 - i)) & 1 for i in range(nbits)], dtype=np.uint8)


def bits_to_uint(bits) -> int:
    v = 0
    for b in np.asarray(bits).tolist():
        v = (v << 1) | b
    return v


def encode_envelope(payload: bytes) -> BitStream:
    """32-bit big-endian bit count, then the payload bits MSB-first."""
    payload = bytes(payload)
    if len(payload) >= MAX_PAYLOAD_BYTES:
        raise PayloadTooLarge(f"{len(payload)} bytes")
    header = uint_to_bits(8 * len(payload), LENGTH_FIELD_BITS)
    body = np.unpackbits(np.frombuffer(payload, dtype=np.uint8))
    return BitStream(np.concatenate([header, body]))


def envelope_bit_length(payload_len: int) -> int:
    return LENGTH_FIELD_BITS + 8 * payload_len


def decode_envelope(bits) -> bytes:
    """Inverse of :func:`encode_envelope`; trailing padding is ignored."""
    arr = as_bit_array(bits)
    if len(arr) < LENGTH_FIELD_BITS:
        raise TruncatedEnvelope(f"only {len(arr)} bits, need a 32-bit header")
    nbits = bits_to_uint(arr[:LENGTH_FIELD_BITS])
    if nbits % 8:
        raise LengthNotByteAligned(f"declared length {nbits} bits")
    end = LENGTH_FIELD_BITS + nbits
    if end > len(arr):
        raise TruncatedEnvelope(f"declared {nbits} payload bits, {len(arr) - 32} available")
    return np.packbits(arr[LENGTH_FIELD_BITS:end]).tobytes()
