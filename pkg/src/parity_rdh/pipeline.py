"""Multi-layer embedding, payload enveloping and capacity probing."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import de, layer
from .bit_io import BitStream, decode_envelope, encode_envelope
from .errors import (AuxOrderingViolation, CorruptMapStream, EnvelopeError, InsufficientCapacity,
                     LayerCountMismatch, OverlapViolation)
from .image_core import GrayImage
from .layer import TransportMode
from .metrics import CapacityReport, capacity_figures, format_db, psnr


@dataclass(frozen=True)
class Method:
    name: str
    embed: object
    extract: object
    magic: bytes
    stages: int

    def dims(self, shape):
        h, w = shape
        return [(h, w // 2), (h // 2, w)][: self.stages]

    def sidecar_stages(self, shape, trace):
        maps = [trace.sidecar_cm] if self.stages == 1 else [trace.sidecar_cm1, trace.sidecar_cm2]
        return [(r, c, cm) for (r, c), cm in zip(self.dims(shape), maps)]

    def sidecar_arg(self, stages):
        if self.stages == 1:
            return stages[0][2]
        return stages[0][2], stages[1][2]


METHODS = {
    "proposed": Method("proposed", layer.embed_layer, layer.extract_layer, b"PSM1", 2),
    "de": Method("de", de.de_embed, de.de_extract, b"PSD1", 1),
}


@dataclass
class PipelineTrace:
    layers: list
    mode: TransportMode
    payload_bits: int
    method: str = "proposed"
    shape: tuple[int, int] = (0, 0)

    @property
    def k(self) -> int:
        return len(self.layers)

    @property
    def secret_bits(self) -> int:
        return sum(t.secret_bits for t in self.layers)

    @property
    def gross_bits(self) -> int:
        return sum(t.gross_bits for t in self.layers)

    def as_dict(self) -> dict:
        return {"method": self.method, "k": self.k, "mode": self.mode.value,
                "height": self.shape[0], "width": self.shape[1],
                "payloadBits": self.payload_bits, "secretBits": self.secret_bits,
                "layers": [t.as_dict() for t in self.layers]}

    def to_text(self) -> str:
        return json.dumps(self.as_dict(), indent=2)


def _method(name) -> Method:
    try:
        return METHODS[name]
    except KeyError:
        raise ValueError(f"unknown method {name!r}; choose from {sorted(METHODS)}") from None


def embed_bits(O: GrayImage, stream: BitStream, k: int, mode, method="proposed"):
    """Apply ``k`` layers, each reading its secret bits from ``stream``."""
    if k < 1:
        raise ValueError("layer count must be >= 1")
    m = _method(method)
    mode = TransportMode.parse(mode)
    X = O
    traces = []
    for _ in range(k):
        X, t = m.embed(X, stream, mode)
        traces.append(t)
    return X, traces


def embed_multilayer(O: GrayImage, payload: bytes, k: int, mode=TransportMode.SIDECAR,
                     method: str = "proposed"):
    """Embed ``payload`` with ``k`` layers, filling layer 1 first.

    Returns ``(X, PipelineTrace, sidecar_bytes)``; ``sidecar_bytes`` is None
    for in-band transport.
    """
    mode = TransportMode.parse(mode)
    env = encode_envelope(payload)
    # each layer carries at most H*W bits; the rest of the stream is zero padding
    stream = BitStream(np.concatenate([env.bits, np.zeros(k * O.size, dtype=np.uint8)]))
    X, traces = embed_bits(O, stream, k, mode, method)
    trace = PipelineTrace(traces, mode, len(env), method, O.shape)
    if trace.secret_bits < len(env):
        raise InsufficientCapacity(
            f"envelope needs {len(env)} bits, {k} layer(s) carry {trace.secret_bits}",
            needed=len(env), available=trace.secret_bits)
    sidecar = None
    if mode is TransportMode.SIDECAR:
        m = _method(method)
        sidecar = layer.pack_sidecar([m.sidecar_stages(O.shape, t) for t in traces],
                                     mode, m.magic)
    return X, trace, sidecar


def extract_bits(X: GrayImage, k: int, mode, sidecar: bytes | None = None,
                 method: str = "proposed"):
    """Undo ``k`` layers; returns (secret bits in embed order, cover, traces)."""
    m = _method(method)
    mode = TransportMode.parse(mode)
    per_layer = [None] * k
    if mode is TransportMode.SIDECAR:
        if sidecar is None:
            raise CorruptMapStream("sidecar transport needs the sidecar data")
        smode, layers = layer.unpack_sidecar(sidecar, m.stages, m.magic)
        if smode is not None and smode is not mode:
            raise CorruptMapStream("sidecar was written for a different transport mode")
        if len(layers) != k:
            raise LayerCountMismatch(f"sidecar holds {len(layers)} layer(s), asked for {k}")
        for stages in layers:
            if [s[:2] for s in stages] != m.dims(X.shape):
                raise CorruptMapStream("sidecar map dimensions do not match the image")
        per_layer = [m.sidecar_arg(s) for s in layers]
    img = X
    bits = [None] * k
    traces = [None] * k
    for i in reversed(range(k)):
        S, img, traces[i] = m.extract(img, mode, per_layer[i])
        bits[i] = S.bits
    return np.concatenate(bits) if bits else np.zeros(0, np.uint8), img, traces


def extract_multilayer(X: GrayImage, k: int, mode=TransportMode.SIDECAR,
                       sidecar: bytes | None = None, method: str = "proposed"):
    """Returns ``(payload, O)``."""
    allbits, O, _ = extract_bits(X, k, mode, sidecar, method)
    try:
        payload = decode_envelope(allbits)
    except EnvelopeError as exc:
        raise LayerCountMismatch(f"recovered stream is not a valid envelope ({exc})") from exc
    end = 32 + 8 * len(payload)
    if np.any(allbits[end:]):
        raise LayerCountMismatch("non-zero bits after the envelope")
    return payload, O


def capacity_probe(O: GrayImage, k: int, mode=TransportMode.SIDECAR,
                   method: str = "proposed") -> CapacityReport:
    """Embed an all-zero secret and report per-layer LE/LC and PSNR."""
    mode = TransportMode.parse(mode)
    stream = BitStream.zeros(k * O.size)
    X, traces = embed_bits(O, stream, k, mode, method)
    trace = PipelineTrace(traces, mode, 0, method, O.shape)
    return capacity_figures(trace, *O.shape, psnr_db=psnr(O, X))


def max_payload_embed(O: GrayImage, k: int, mode, rng: np.random.Generator,
                      method: str = "proposed", attempts: int = 16):
    """Embed the longest random payload that fits, for benchmarking.

    Capacity depends on the embedded bits (the vertical map is built after the
    horizontal stage), so the zero-secret probe only gives a starting length.
    Failures bisect between the longest length known to fit and the shortest
    known to fail; an envelope-level shortfall jumps straight to the length
    the reported capacity allows.
    """
    mode = TransportMode.parse(mode)
    probe = capacity_probe(O, k, mode, method)
    length = max(0, (probe.net_bits if mode is TransportMode.INBAND else probe.gross_bits) - 32) // 8
    pool = rng.bytes(length)
    lo = hi = None  # longest known fit, shortest known failure
    best = last = None
    for _ in range(attempts):
        payload = pool[:length]
        try:
            X, trace, side = embed_multilayer(O, payload, k, mode, method)
            lo, best = length, (payload, X, trace, side)
        except (InsufficientCapacity, OverlapViolation, AuxOrderingViolation) as exc:
            last, hi = exc, length
            if length == 0:
                break
        if hi is None or (lo is not None and hi - lo <= 1):
            break
        if lo is not None:
            length = (lo + hi) // 2
        elif getattr(last, "needed", None) == 32 + 8 * length:
            length = max(0, length - max(1, (last.needed - last.available + 7) // 8))
        else:
            length //= 2
    if best is None:
        raise last
    return best


def report_text(trace: PipelineTrace, O: GrayImage, X: GrayImage) -> str:
    rep = capacity_figures(trace, *O.shape, psnr_db=psnr(O, X))
    d = trace.as_dict()
    d["capacity"] = rep.as_dict()
    d["psnr_dB"] = format_db(rep.psnr_db)
    return json.dumps(d, indent=2)
