"""Difference-expansion baseline, one bit per expandable horizontal pair.

For a pair (x, y) with integer average ``l = (x + y) // 2`` and difference
``h = x - y``, the expanded difference is ``h' = 2h + b`` and the pair is
rebuilt as ``x' = l + (h' + 1) // 2``, ``y' = l - h' // 2``. A pair is
expandable when ``|2h + b| <= min(2 * (255 - l), 2 * l + 1)`` for both bits.
No difference threshold is applied and changeable (LSB-only) pairs are not
used. Location-map transport reuses the layer stage engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bit_io import BitStream, as_bit_array
from .errors import CorruptMapStream, InconsistentMap
from .image_core import GrayImage, horizontal_layout
from .layer import TransportMode, embed_stage, extract_stage, plan_stage
from .maps import CompressedMap


def _bound(l):
    return np.minimum(2 * (255 - l), 2 * l + 1)


def _expandable(x, y):
    l = (x + y) >> 1
    h = x - y
    bound = _bound(l)
    return (np.abs(2 * h) <= bound) & (np.abs(2 * h + 1) <= bound)


def de_transform(x: int, y: int, b: int):
    """Expand (x, y) with bit b; returns ``(x', y')`` or None when not expandable."""
    if not _expandable(np.int64(x), np.int64(y)):
        return None
    l = (x + y) // 2
    h2 = 2 * (x - y) + b
    return l + (h2 + 1) // 2, l - h2 // 2


def de_inverse(xp: int, yp: int) -> tuple[int, int, int]:
    """Recover ``(x, y, b)`` from an expanded pair."""
    l = (xp + yp) // 2
    h2 = xp - yp
    h = h2 // 2
    return l + (h + 1) // 2, l - h // 2, h2 & 1


class DERule:
    name = "difference-expansion"
    deltas = None

    @staticmethod
    def embeddable(a, b):
        return _expandable(a.astype(np.int32), b.astype(np.int32))

    @staticmethod
    def embed(a, b, bits):
        a = a.astype(np.int32)
        b = b.astype(np.int32)
        l = (a + b) >> 1
        h2 = 2 * (a - b) + bits
        return l + ((h2 + 1) >> 1), l - (h2 >> 1)

    @staticmethod
    def extract(a, b, inmap):
        a = a.astype(np.int32)
        b = b.astype(np.int32)
        ea, eb = a[inmap], b[inmap]
        l = (ea + eb) >> 1
        h2 = ea - eb
        h = h2 >> 1
        ra, rb = l + ((h + 1) >> 1), l - (h >> 1)
        if len(ra) and not np.all(_expandable(ra, rb)):
            raise InconsistentMap("map marks a pair whose restored values are not expandable")
        a = a.copy()
        b = b.copy()
        a[inmap] = ra
        b[inmap] = rb
        return (h2 & 1).astype(np.uint8), a, b


@dataclass
class DETrace:
    le: int
    lc: int
    ls: int
    mode: TransportMode
    sidecar_cm: CompressedMap | None = field(default=None, repr=False)

    # layer-trace compatible view: DE has a single (horizontal) stage
    @property
    def le1(self):
        return self.le

    @property
    def lc1(self):
        return self.lc

    @property
    def ls1(self):
        return self.ls

    le2 = lc2 = ls2 = 0

    @property
    def secret_bits(self) -> int:
        return self.ls

    @property
    def gross_bits(self) -> int:
        return self.le

    def as_dict(self) -> dict:
        return {"LE": self.le, "LC": self.lc, "LS": self.ls, "mode": self.mode.value}


def de_embed(O: GrayImage, S, mode=TransportMode.SIDECAR):
    """Embed into every expandable pair.

    ``S`` is either a BitStream (the next LS bits are read) or a bit array of
    exactly LS bits.
    """
    mode = TransportMode.parse(mode)
    plan = plan_stage(O, horizontal_layout(*O.shape), DERule, mode)
    bits = S.read(plan.ls) if isinstance(S, BitStream) else as_bit_array(S)
    X, st = embed_stage(O, plan, bits)
    side = st.cmap if mode is TransportMode.SIDECAR else None
    return X, DETrace(st.le, st.lc, st.ls, mode, side)


def de_extract(X: GrayImage, mode=TransportMode.SIDECAR, sidecar: CompressedMap | None = None):
    mode = TransportMode.parse(mode)
    if mode is TransportMode.SIDECAR and sidecar is None:
        raise CorruptMapStream("sidecar transport needs the compressed map")
    O, bits, st = extract_stage(X, horizontal_layout(*X.shape), DERule, mode, sidecar)
    return BitStream(bits), O, DETrace(st.le, st.lc, st.ls, mode,
                                       sidecar if mode is TransportMode.SIDECAR else None)


def de_capacity(O: GrayImage) -> int:
    """Number of expandable horizontal pairs (one bit each)."""
    lay = horizontal_layout(*O.shape)
    flat = O.flat()
    return int(DERule.embeddable(flat[lay.first], flat[lay.second]).sum())
