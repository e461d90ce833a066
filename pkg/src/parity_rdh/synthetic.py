"""Synthetic cover generators for self-contained benchmarks and tests."""

from __future__ import annotations

import numpy as np

from .image_core import GrayImage


def uniform(h: int, w: int, rng: np.random.Generator) -> GrayImage:
    return GrayImage(rng.integers(0, 256, size=(h, w), dtype=np.uint8))


def constant(h: int, w: int, value: int = 128) -> GrayImage:
    return GrayImage(np.full((h, w), value, dtype=np.uint8))


def gradient(h: int, w: int) -> GrayImage:
    """Diagonal ramp from 0 to 255."""
    i, j = np.mgrid[0:h, 0:w]
    denom = max(h + w - 2, 1)
    return GrayImage(np.round(255 * (i + j) / denom).astype(np.uint8))


def block_parity(h: int, w: int, rng: np.random.Generator, block: int = 8) -> GrayImage:
    """Blocky random texture with even columns forced even and odd columns odd.

    Every horizontal pair is embeddable and, for a near-zero secret, so is
    every vertical pair, which keeps both location maps compressible enough
    for in-band transport.
    """
    bh, bw = -(-h // block), -(-w // block)
    base = rng.integers(8, 248, size=(bh, bw))
    img = np.kron(base, np.ones((block, block), dtype=np.int64))[:h, :w]
    img = img + rng.integers(-4, 5, size=(h, w))
    img = np.clip(img, 1, 254)
    odd_col = (np.arange(w) % 2 == 1)[None, :]
    img = np.where(odd_col, img | 1, img & ~1)
    return GrayImage(img.astype(np.uint8))


GENERATORS = ("uniform", "constant", "gradient", "block_parity")


def make(kind: str, h: int, w: int, seed: int = 0, value: int = 128, block: int = 8) -> GrayImage:
    rng = np.random.default_rng(seed)
    if kind == "uniform":
        return uniform(h, w, rng)
    if kind == "constant":
        return constant(h, w, value)
    if kind == "gradient":
        return gradient(h, w)
    if kind == "block_parity":
        return block_parity(h, w, rng, block)
    raise ValueError(f"unknown synthetic kind {kind!r}; choose from {GENERATORS}")
