"""Capacity / PSNR table for one, two and five layers, proposed method vs. DE.

Writes results/bench.{json,csv,md} and prints the markdown table, including
the comparison against the published figures for the proposed method.
"""

import argparse
import time

from parity_rdh.bench import BenchConfig, run_bench


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/bench.yaml")
    ap.add_argument("--out", help="override the report prefix")
    args = ap.parse_args()
    cfg = BenchConfig.load(args.config)
    if args.out:
        cfg.out = args.out
    t0 = time.perf_counter()
    report = run_bench(cfg)
    print(report.to_markdown())
    print(f"{len(report.rows)} rows in {time.perf_counter() - t0:.1f}s; written to {cfg.out}.*")


if __name__ == "__main__":
    main()
