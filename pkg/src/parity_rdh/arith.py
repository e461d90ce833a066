"""Adaptive binary arithmetic coder with 32-bit integer registers.

Single adaptive model over the two symbols with counts starting at 1/1;
both counts are halved (rounding up) whenever their sum reaches 2**16.
Underflow is handled with pending (follow-on) bits. Termination emits the
second-most-significant bit of ``low`` followed by ``pending + 1`` copies of
its complement, so a decoder may treat any bits past the end as zeros.
"""

from __future__ import annotations

import numpy as np

from .errors import CorruptMapStream

STATE_BITS = 32
TOP = (1 << STATE_BITS) - 1
HALF = 1 << (STATE_BITS - 1)
QUARTER = 1 << (STATE_BITS - 2)
THREE_QUARTERS = 3 * QUARTER
MAX_TOTAL = 1 << 16

# The decoder primes 32 bits and shifts once per encoder shift, while the
# encoder emits two closing bits, so a valid stream over-reads by 30 bits.
MAX_OVERREAD = STATE_BITS


def encode_bits(symbols) -> np.ndarray:
    """Arithmetic-code a binary sequence; returns the body bits."""
    low, high = 0, TOP
    c0 = c1 = 1
    pending = 0
    out: list[int] = []
    emit = out.append
    for s in np.asarray(symbols, dtype=np.uint8).tolist():
        split = low + (high - low + 1) * c0 // (c0 + c1) - 1
        if s:
            low = split + 1
            c1 += 1
        else:
            high = split
            c0 += 1
        if c0 + c1 >= MAX_TOTAL:
            c0 = (c0 + 1) >> 1
            c1 = (c1 + 1) >> 1
        while True:
            if high < HALF:
                emit(0)
                if pending:
                    out.extend([1] * pending)
                    pending = 0
            elif low >= HALF:
                emit(1)
                if pending:
                    out.extend([0] * pending)
                    pending = 0
                low -= HALF
                high -= HALF
            elif low >= QUARTER and high < THREE_QUARTERS:
                pending += 1
                low -= QUARTER
                high -= QUARTER
            else:
                break
            low <<= 1
            high = (high << 1) | 1
    pending += 1
    if low < QUARTER:
        emit(0)
        out.extend([1] * pending)
    else:
        emit(1)
        out.extend([0] * pending)
    return np.array(out, dtype=np.uint8)


def decode_bits(body, n_symbols: int) -> np.ndarray:
    """Decode ``n_symbols`` symbols from ``body``.

    Raises CorruptMapStream when decoding would need more than the allowed
    zero-padding past the end of the body.
    """
    bits = np.asarray(body, dtype=np.uint8).tolist()
    nb = len(bits)
    if n_symbols == 0:
        return np.zeros(0, dtype=np.uint8)
    limit = nb + MAX_OVERREAD
    value = 0
    for i in range(STATE_BITS):
        value = (value << 1) | (bits[i] if i < nb else 0)
    pos = STATE_BITS
    low, high = 0, TOP
    c0 = c1 = 1
    out = bytearray(n_symbols)
    for k in range(n_symbols):
        split = low + (high - low + 1) * c0 // (c0 + c1) - 1
        if value <= split:
            high = split
            c0 += 1
        else:
            low = split + 1
            c1 += 1
            out[k] = 1
        if c0 + c1 >= MAX_TOTAL:
            c0 = (c0 + 1) >> 1
            c1 = (c1 + 1) >> 1
        while True:
            if high < HALF:
                pass
            elif low >= HALF:
                low -= HALF
                high -= HALF
                value -= HALF
            elif low >= QUARTER and high < THREE_QUARTERS:
                low -= QUARTER
                high -= QUARTER
                value -= QUARTER
            else:
                break
            low <<= 1
            high = (high << 1) | 1
            value = (value << 1) | (bits[pos] if pos < nb else 0)
            pos += 1
        if pos > limit:
            raise CorruptMapStream(
                f"map body exhausted after {k + 1} of {n_symbols} symbols")
    return np.frombuffer(bytes(out), dtype=np.uint8).copy()
