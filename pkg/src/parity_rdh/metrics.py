"""Distortion (MSE/PSNR) and capacity figures."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .image_core import GrayImage

PEAK_SQ = 255 * 255


@dataclass(frozen=True)
class QualityResult:
    mse: float
    psnr_db: float


def sse(a: GrayImage, b: GrayImage) -> int:
    """Exact integer sum of squared differences."""
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    d = a.pixels.astype(np.int64) - b.pixels.astype(np.int64)
    return int(np.dot(d.ravel(), d.ravel()))


def mse(a: GrayImage, b: GrayImage) -> float:
    return sse(a, b) / a.size


def psnr(a: GrayImage, b: GrayImage) -> float:
    """PSNR in dB; ``math.inf`` for identical images."""
    total = sse(a, b)
    if total == 0:
        return math.inf
    return 10.0 * math.log10(PEAK_SQ * a.size / total)


def quality(a: GrayImage, b: GrayImage) -> QualityResult:
    return QualityResult(mse(a, b), psnr(a, b))


def format_db(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.4f}"


@dataclass
class LayerCapacity:
    le1: int
    le2: int
    lc1: int
    lc2: int
    gross_bits: int
    net_bits: int
    sidecar_bits: int
    inband_net_bits: int


@dataclass
class CapacityReport:
    height: int
    width: int
    mode: str
    layers: list[LayerCapacity] = field(default_factory=list)
    psnr_db: float | None = None

    @property
    def pixels(self) -> int:
        return self.height * self.width

    @property
    def gross_bits(self) -> int:
        return sum(l.gross_bits for l in self.layers)

    @property
    def net_bits(self) -> int:
        return sum(l.net_bits for l in self.layers)

    @property
    def sidecar_bits(self) -> int:
        return sum(l.sidecar_bits for l in self.layers)

    @property
    def inband_net_bits(self) -> int:
        return sum(l.inband_net_bits for l in self.layers)

    @property
    def gross_bpp(self) -> float:
        return self.gross_bits / self.pixels

    @property
    def net_bpp(self) -> float:
        return self.net_bits / self.pixels

    @property
    def sidecar_bpp(self) -> float:
        return self.sidecar_bits / self.pixels

    @property
    def inband_net_bpp(self) -> float:
        return self.inband_net_bits / self.pixels

    def as_dict(self) -> dict:
        return {
            "height": self.height, "width": self.width, "mode": self.mode,
            "layers": [
                {"LE1": l.le1, "LE2": l.le2, "LC1": l.lc1, "LC2": l.lc2,
                 "grossBits": l.gross_bits, "netBits": l.net_bits,
                 "sidecarBits": l.sidecar_bits, "inbandNetBits": l.inband_net_bits,
                 "grossBpp": l.gross_bits / self.pixels, "netBpp": l.net_bits / self.pixels}
                for l in self.layers],
            "grossBits": self.gross_bits, "netBits": self.net_bits,
            "sidecarBits": self.sidecar_bits, "inbandNetBits": self.inband_net_bits,
            "grossBpp": self.gross_bpp, "netBpp": self.net_bpp,
            "sidecarBpp": self.sidecar_bpp, "inbandNetBpp": self.inband_net_bpp,
            "psnr_dB": None if self.psnr_db is None else format_db(self.psnr_db),
        }


def layer_capacity(le1, le2, lc1, lc2, mode: str) -> LayerCapacity:
    gross = le1 + le2
    maps = lc1 + lc2
    if mode == "inband":
        return LayerCapacity(le1, le2, lc1, lc2, gross, gross - maps, 0, gross - maps)
    return LayerCapacity(le1, le2, lc1, lc2, gross, gross, maps, gross - maps)


def capacity_figures(trace, height: int, width: int, psnr_db: float | None = None) -> CapacityReport:
    """Capacity report from a PipelineTrace (or any object with ``layers`` and ``mode``).

    Each layer only needs ``le1, le2, lc1, lc2``; negative net figures are
    reported as they are.
    """
    mode = getattr(trace.mode, "value", trace.mode)
    rep = CapacityReport(height, width, mode, psnr_db=psnr_db)
    for l in trace.layers:
        rep.layers.append(layer_capacity(l.le1, l.le2, l.lc1, l.lc2, mode))
    return rep
