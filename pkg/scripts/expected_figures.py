"""Exact expected gross bpp and MSE of one layer on a uniform-random cover.

Enumerates the pixel parities of a 2x2 block and the embedded bits; every
2x2 block of a uniform cover is an independent draw, so the block averages
are the image expectations. Then compares against a measured run.
"""

import itertools
import math
from fractions import Fraction

import numpy as np

from parity_rdh import synthetic
from parity_rdh.bit_io import BitStream
from parity_rdh.layer import TransportMode, embed_layer, hr_apply, vr_apply


def block_expectation():
    gross = sq = Fraction(0)
    w = Fraction(1, 256)
    for par in itertools.product((0, 1), repeat=4):
        orig = [100 + p for p in par]
        for bits in itertools.product((0, 1), repeat=4):
            x, it, n = list(orig), iter(bits), 0
            for i, j in ((0, 1), (2, 3)):
                if x[j] % 2:
                    x[i], x[j] = hr_apply(x[i], x[j], next(it))
                    n += 1
            for i, j in ((0, 2), (1, 3)):
                if x[j] % 2 == 0:
                    x[i], x[j] = vr_apply(x[i], x[j], next(it))
                    n += 1
            gross += w * n
            sq += w * sum((a - b) ** 2 for a, b in zip(x, orig))
    return gross / 4, sq / 4


def main():
    g, m = block_expectation()
    print(f"expected gross bpp {g} = {float(g):.4f}")
    print(f"expected MSE {m} = {float(m):.5f} -> PSNR {10 * math.log10(255 ** 2 / m):.4f} dB")
    rng = np.random.default_rng(0)
    O = synthetic.uniform(512, 512, rng)
    X, tr = embed_layer(O, BitStream(rng.integers(0, 2, O.size)), TransportMode.SIDECAR)
    d = (X.flat() - O.flat()).astype(float)
    print(f"measured 512x512: gross {tr.gross_bits / O.size:.4f} bpp, MSE {np.mean(d * d):.5f}, "
          f"vertical embeddable fraction {tr.le2 / (O.size / 2):.4f}")


if __name__ == "__main__":
    main()
