"""Write the synthetic covers used by the benchmark as PGM files."""

import argparse
from pathlib import Path

from parity_rdh import synthetic
from parity_rdh.image_core import write_pgm


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="corpus")
    ap.add_argument("--size", type=int, default=512)
    ap.add_argument("--seeds", type=int, default=3)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    n = args.size
    covers = {f"uniform-s{s}": synthetic.make("uniform", n, n, seed=s) for s in range(args.seeds)}
    covers["gradient"] = synthetic.gradient(n, n)
    covers["constant-128"] = synthetic.constant(n, n, 128)
    covers["block_parity-s0"] = synthetic.make("block_parity", n, n, seed=0)
    for name, img in covers.items():
        write_pgm(out / f"{name}.pgm", img)
        print(out / f"{name}.pgm")


if __name__ == "__main__":
    main()
