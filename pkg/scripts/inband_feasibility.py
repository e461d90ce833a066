"""Survey which covers admit in-band map transport and how much payload they carry."""

import argparse

import numpy as np

from parity_rdh import synthetic
from parity_rdh.errors import StegoError
from parity_rdh.layer import TransportMode
from parity_rdh.pipeline import capacity_probe, max_payload_embed


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", nargs="*", default=["64x64", "128x128", "128x256", "256x256", "512x512"])
    ap.add_argument("--kinds", nargs="*", default=["uniform", "gradient", "block_parity"])
    ap.add_argument("--layers", nargs="*", type=int, default=[1, 2])
    args = ap.parse_args()
    print("| cover | k | LE1 | LC1 | LE2 | LC2 | max payload bytes |")
    print("|---|---|---|---|---|---|---|")
    for kind in args.kinds:
        for size in args.sizes:
            h, w = (int(v) for v in size.split("x"))
            O = synthetic.make(kind, h, w, seed=0)
            side = capacity_probe(O, 1, TransportMode.SIDECAR).layers[0]
            for k in args.layers:
                try:
                    payload, *_ = max_payload_embed(O, k, TransportMode.INBAND,
                                                    np.random.default_rng(k))
                    res = str(len(payload))
                except StegoError as exc:
                    res = type(exc).__name__
                print(f"| {kind} {size} | {k} | {side.le1} | {side.lc1} | {side.le2} | "
                      f"{side.lc2} | {res} |")


if __name__ == "__main__":
    main()
