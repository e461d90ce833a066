"""One embedding layer: horizontal parity stage, then vertical parity stage.

Each stage scans its pairs, embeds one bit per embeddable pair, and (in-band
transport) LSB-replaces the compressed location map into the first LC
row-major pixels. The LSBs those pixels held after embedding are carried as
auxiliary bits by the last LC embeddable pairs, so extraction can restore
them. Sidecar transport skips the LSB step and returns the maps instead.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field

import numpy as np

from .bit_io import LENGTH_FIELD_BITS, BitStream, as_bit_array, bits_to_uint
from .errors import (AuxOrderingViolation, CorruptMapStream, InconsistentMap,
                     InsufficientCapacity, NotEmbeddable, OverlapViolation)
from .image_core import GrayImage, PairLayout, horizontal_layout, vertical_layout
from .maps import CompressedMap, LocationMap, compress_map, decompress_map


class TransportMode(enum.Enum):
    INBAND = "inband"
    SIDECAR = "sidecar"

    @classmethod
    def parse(cls, value) -> "TransportMode":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


_MODE_BYTE = {TransportMode.INBAND: 0, TransportMode.SIDECAR: 1}
_BYTE_MODE = {v: k for k, v in _MODE_BYTE.items()}


# ---- scalar rules ----

def hr_apply(x: int, y: int, b: int) -> tuple[int, int]:
    if y % 2 == 0:
        raise NotEmbeddable(f"y={y} is even")
    return (x, y) if b else (x, y - 1)


def vr_apply(u: int, v: int, b: int) -> tuple[int, int]:
    if v % 2:
        raise NotEmbeddable(f"v={v} is odd")
    return (u, v + 1) if b else (u, v)


def hx_apply(x: int, y: int, in_e1: bool) -> tuple[int | None, int, int]:
    """Returns ``(bit or None, x, y)`` with the pair restored."""
    if y % 2:
        if not in_e1:
            raise InconsistentMap(f"odd y={y} outside the embeddable set")
        return 1, x, y
    if in_e1:
        return 0, x, y + 1
    return None, x, y


def vx_apply(u: int, v: int, in_e2: bool) -> tuple[int | None, int, int]:
    if v % 2 == 0:
        if not in_e2:
            raise InconsistentMap(f"even v={v} outside the embeddable set")
        return 0, u, v
    if in_e2:
        return 1, u, v - 1
    return None, u, v


# ---- vectorised rules used by the stage engine ----

class HorizontalRule:
    name = "horizontal"
    # allowed deltas on (first, second) pixel for an embedded pair
    deltas = ((0,), (0, -1))

    @staticmethod
    def embeddable(a, b):
        return (b & 1) == 1

    @staticmethod
    def embed(a, b, bits):
        return a, b - (1 - bits.astype(b.dtype))

    @staticmethod
    def extract(a, b, inmap):
        odd = (b & 1).astype(bool)
        if np.any(odd & ~inmap):
            raise InconsistentMap("odd y in a pair the map marks non-embeddable")
        bits = odd[inmap].astype(np.uint8)
        return bits, a, np.where(inmap & ~odd, b + 1, b)


class VerticalRule:
    name = "vertical"
    deltas = ((0,), (0, 1))

    @staticmethod
    def embeddable(a, b):
        return (b & 1) == 0

    @staticmethod
    def embed(a, b, bits):
        return a, b + bits.astype(b.dtype)

    @staticmethod
    def extract(a, b, inmap):
        odd = (b & 1).astype(bool)
        if np.any(~odd & ~inmap):
            raise InconsistentMap("even v in a pair the map marks non-embeddable")
        bits = odd[inmap].astype(np.uint8)
        return bits, a, np.where(inmap & odd, b - 1, b)


# ---- traces ----

@dataclass
class StageTrace:
    le: int
    lc: int
    ls: int
    mode: TransportMode
    cmap: CompressedMap = field(repr=False)
    carrier: GrayImage | None = field(default=None, repr=False, compare=False)
    """Image after pair embedding, before the map's LSB replacement (T or V)."""


@dataclass
class LayerTrace:
    le1: int
    le2: int
    lc1: int
    lc2: int
    ls1: int
    ls2: int
    mode: TransportMode
    sidecar_cm1: CompressedMap | None = field(default=None, repr=False)
    sidecar_cm2: CompressedMap | None = field(default=None, repr=False)

    @property
    def secret_bits(self) -> int:
        return self.ls1 + self.ls2

    @property
    def gross_bits(self) -> int:
        return self.le1 + self.le2

    def as_dict(self) -> dict:
        return {"LE1": self.le1, "LE2": self.le2, "LC1": self.lc1, "LC2": self.lc2,
                "LS1": self.ls1, "LS2": self.ls2, "mode": self.mode.value}

    @classmethod
    def from_stages(cls, h: StageTrace, v: StageTrace) -> "LayerTrace":
        side = h.mode is TransportMode.SIDECAR
        return cls(h.le, v.le, h.lc, v.lc, h.ls, v.ls, h.mode,
                   h.cmap if side else None, v.cmap if side else None)


# ---- stage engine ----

@dataclass(eq=False)
class StagePlan:
    layout: PairLayout
    rule: object
    mode: TransportMode
    lmap: LocationMap
    cmap: CompressedMap
    embeddable: np.ndarray  # pair ordinals of the embeddable set, ascending
    aux_pixels: np.ndarray | None = None

    @property
    def le(self) -> int:
        return len(self.embeddable)

    @property
    def lc(self) -> int:
        return len(self.cmap)

    @property
    def ls(self) -> int:
        if self.mode is TransportMode.SIDECAR:
            return self.le
        return self.le - self.lc


def aux_order(layout: PairLayout, lc: int) -> tuple[np.ndarray, np.ndarray]:
    """Pixels below row-major index ``lc`` in the order their LSBs join the aux stream.

    Unpaired pixels are never modified and come first; paired pixels follow in
    the order the scan finalizes them. Returns the pixel indices and, for each,
    the ordinal of the pair whose processing produces it (-1 for unpaired).
    """
    un = layout.unpaired[layout.unpaired < lc]
    pix = np.column_stack([layout.first, layout.second]).ravel()
    producer = np.repeat(np.arange(layout.n_pairs), 2)
    sel = pix < lc
    return (np.concatenate([un, pix[sel]]),
            np.concatenate([np.full(len(un), -1, dtype=np.int64), producer[sel]]))


def _check_tail_separation(layout: PairLayout, tail: np.ndarray, lc: int, rule) -> None:
    if len(tail) and (layout.first[tail].min() < lc or layout.second[tail].min() < lc):
        raise OverlapViolation(
            f"{rule.name} stage: a pair carrying auxiliary bits lies inside the "
            f"{lc}-pixel map region")


def plan_stage(img: GrayImage, layout: PairLayout, rule, mode: TransportMode) -> StagePlan:
    flat = img.flat()
    mask = rule.embeddable(flat[layout.first], flat[layout.second])
    lmap = LocationMap(*layout.map_shape, mask.astype(np.uint8), layout.column_major)
    plan = StagePlan(layout, rule, mode, lmap, compress_map(lmap), np.flatnonzero(mask))
    if mode is TransportMode.INBAND:
        lc, le = plan.lc, plan.le
        if lc > le or lc > layout.n_pixels:
            raise InsufficientCapacity(
                f"{rule.name} stage: compressed map needs {lc} bits but only {le} "
                f"pairs are embeddable", needed=lc, available=le)
        tail = plan.embeddable[le - lc:]
        _check_tail_separation(layout, tail, lc, rule)
        pixels, producer = aux_order(layout, lc)
        if np.any(producer >= tail):
            raise AuxOrderingViolation(
                f"{rule.name} stage: an auxiliary bit would be consumed before it exists")
        plan.aux_pixels = pixels
    return plan


def _apply(flat, layout, rule, ordinals, bits):
    if len(ordinals) == 0:
        return
    fi, si = layout.first[ordinals], layout.second[ordinals]
    a, b = rule.embed(flat[fi], flat[si], np.asarray(bits, dtype=np.uint8))
    flat[fi] = a
    flat[si] = b


def _check_range(flat, rule):
    if flat.min() < 0 or flat.max() > 255:
        raise AssertionError(f"{rule.name} stage pushed a pixel outside [0, 255]")


def _check_locality(before, after, plan) -> None:
    lay, rule = plan.layout, plan.rule
    deltas = getattr(rule, "deltas", None)
    if deltas is None:
        return
    d = after - before
    first_ok, second_ok = deltas
    touched = np.zeros(len(d), dtype=bool)
    touched[lay.second[plan.embeddable]] = True
    assert np.all(d[~touched] == 0), "stage changed a pixel outside embeddable positions"
    assert np.all(np.isin(d[touched], second_ok)), "stage delta outside the rule's range"
    assert np.all(np.isin(d[lay.first], first_ok))


def embed_stage(img: GrayImage, plan: StagePlan, secret) -> tuple[GrayImage, StageTrace]:
    secret = as_bit_array(secret)
    if len(secret) != plan.ls:
        raise InsufficientCapacity(
            f"{plan.rule.name} stage carries exactly {plan.ls} secret bits, got {len(secret)}",
            needed=len(secret), available=plan.ls)
    before = img.flat()
    flat = before.copy()
    lay, rule = plan.layout, plan.rule
    _apply(flat, lay, rule, plan.embeddable[:plan.ls], secret)
    if plan.mode is TransportMode.INBAND:
        aux = (flat[plan.aux_pixels] & 1).astype(np.uint8)
        _apply(flat, lay, rule, plan.embeddable[plan.ls:], aux)
    _check_range(flat, rule)
    _check_locality(before, flat, plan)
    carrier = GrayImage(flat.reshape(img.shape).astype(np.uint8))
    out = carrier
    if plan.mode is TransportMode.INBAND:
        lc = plan.lc
        flat[:lc] = (flat[:lc] & ~1) | plan.cmap.to_bits()
        out = GrayImage(flat.reshape(img.shape).astype(np.uint8))
    return out, StageTrace(plan.le, plan.lc, plan.ls, plan.mode, plan.cmap, carrier)


def read_inband_map(flat: np.ndarray) -> CompressedMap:
    n = len(flat)
    if n < LENGTH_FIELD_BITS:
        raise CorruptMapStream("image too small to hold a map header")
    body = bits_to_uint(flat[:LENGTH_FIELD_BITS] & 1)
    lc = LENGTH_FIELD_BITS + body
    if lc > n:
        raise CorruptMapStream(f"map header claims {body} body bits; image holds {n} pixels")
    return CompressedMap((flat[LENGTH_FIELD_BITS:lc] & 1).astype(np.uint8))


def extract_stage(img: GrayImage, layout: PairLayout, rule, mode: TransportMode,
                  cmap: CompressedMap | None = None) -> tuple[GrayImage, np.ndarray, StageTrace]:
    """Undo one stage; returns the restored image, the secret bits and a trace."""
    flat = img.flat()
    if mode is TransportMode.INBAND:
        cmap = read_inband_map(flat)
    elif cmap is None:
        raise CorruptMapStream("sidecar transport needs the compressed map")
    lmap = decompress_map(cmap, *layout.map_shape, layout.column_major)
    emb = np.flatnonzero(lmap.bits)
    le, lc = len(emb), len(cmap)
    if mode is TransportMode.INBAND:
        if lc > le:
            raise CorruptMapStream(f"map of {lc} bits marks only {le} embeddable pairs")
        ls = le - lc
        tail = emb[ls:]
        _check_tail_separation(layout, tail, lc, rule)
        ta, tb = flat[layout.first[tail]], flat[layout.second[tail]]
        aux, _, _ = rule.extract(ta, tb, np.ones(len(tail), dtype=bool))
        pixels, _ = aux_order(layout, lc)
        flat[pixels] = (flat[pixels] & ~1) | aux
    else:
        ls = le
    inmap = lmap.bits.astype(bool)
    bits, a, b = rule.extract(flat[layout.first], flat[layout.second], inmap)
    flat[layout.first] = a
    flat[layout.second] = b
    _check_range(flat, rule)
    restored = GrayImage(flat.reshape(img.shape).astype(np.uint8))
    return restored, bits[:ls], StageTrace(le, lc, ls, mode, cmap)


# ---- public stage / layer API ----

def _h(img):
    return horizontal_layout(*img.shape)


def _v(img):
    return vertical_layout(*img.shape)


def embed_horizontal_stage(O: GrayImage, S1, mode=TransportMode.SIDECAR):
    mode = TransportMode.parse(mode)
    return embed_stage(O, plan_stage(O, _h(O), HorizontalRule, mode), S1)


def embed_vertical_stage(U: GrayImage, S2, mode=TransportMode.SIDECAR):
    mode = TransportMode.parse(mode)
    return embed_stage(U, plan_stage(U, _v(U), VerticalRule, mode), S2)


def extract_horizontal_stage(U: GrayImage, mode=TransportMode.SIDECAR, cmap=None):
    return extract_stage(U, _h(U), HorizontalRule, TransportMode.parse(mode), cmap)


def extract_vertical_stage(X: GrayImage, mode=TransportMode.SIDECAR, cmap=None):
    return extract_stage(X, _v(X), VerticalRule, TransportMode.parse(mode), cmap)


def embed_layer(O: GrayImage, S: BitStream, mode=TransportMode.SIDECAR,
                keep_stages: bool = False):
    """Embed one layer, reading LS1 then LS2 bits from ``S``.

    Returns ``(X, LayerTrace)``; with ``keep_stages`` also the two StageTraces.
    """
    mode = TransportMode.parse(mode)
    hplan = plan_stage(O, _h(O), HorizontalRule, mode)
    U, htrace = embed_stage(O, hplan, S.read(hplan.ls))
    vplan = plan_stage(U, _v(U), VerticalRule, mode)
    X, vtrace = embed_stage(U, vplan, S.read(vplan.ls))
    trace = LayerTrace.from_stages(htrace, vtrace)
    if keep_stages:
        return X, trace, (htrace, vtrace)
    return X, trace


def extract_layer(X: GrayImage, mode=TransportMode.SIDECAR, sidecar=None):
    """Inverse of :func:`embed_layer`.

    ``sidecar`` is ``(cm1, cm2)`` for sidecar transport. Returns
    ``(S, O, LayerTrace)`` with ``S = S1 || S2``.
    """
    mode = TransportMode.parse(mode)
    cm1 = cm2 = None
    if mode is TransportMode.SIDECAR:
        if sidecar is None:
            raise CorruptMapStream("sidecar transport needs both compressed maps")
        cm1, cm2 = sidecar
    U, s2, vtrace = extract_vertical_stage(X, mode, cm2)
    O, s1, htrace = extract_horizontal_stage(U, mode, cm1)
    return BitStream(np.concatenate([s1, s2])), O, LayerTrace.from_stages(htrace, vtrace)


# ---- sidecar file format ----

def pack_sidecar(layers, mode=TransportMode.SIDECAR, magic: bytes = b"PSM1") -> bytes:
    """Serialize per-layer stage maps.

    ``layers`` is a sequence of lists of ``(rows, cols, CompressedMap)``, one
    list per layer. Each layer record is ``magic``, a mode byte, then for each
    stage rows and cols as big-endian u32 followed by the map blob.
    """
    mode = TransportMode.parse(mode)
    out = bytearray()
    for stages in layers:
        out += magic + bytes([_MODE_BYTE[mode]])
        for rows, cols, cm in stages:
            out += struct.pack(">II", rows, cols) + cm.to_blob()
    return bytes(out)


def unpack_sidecar(data: bytes, stages_per_layer: int = 2, magic: bytes = b"PSM1"):
    """Parse :func:`pack_sidecar` output; returns ``(mode, layers)``."""
    layers = []
    mode = None
    pos = 0
    while pos < len(data):
        if data[pos:pos + 4] != magic:
            raise CorruptMapStream(f"bad sidecar record magic at byte {pos}")
        if pos + 5 > len(data):
            raise CorruptMapStream("truncated sidecar record")
        m = _BYTE_MODE.get(data[pos + 4])
        if m is None:
            raise CorruptMapStream(f"unknown transport byte {data[pos + 4]}")
        mode = m
        pos += 5
        stages = []
        for _ in range(stages_per_layer):
            if pos + 8 > len(data):
                raise CorruptMapStream("truncated sidecar stage header")
            rows, cols = struct.unpack_from(">II", data, pos)
            cm, pos = CompressedMap.read_blob(data, pos + 8)
            stages.append((rows, cols, cm))
        layers.append(stages)
    return mode, layers


def layer_sidecar_stages(O_shape, trace: LayerTrace):
    h, w = O_shape
    return [(h, w // 2, trace.sidecar_cm1), (h // 2, w, trace.sidecar_cm2)]
