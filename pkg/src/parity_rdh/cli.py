"""Command-line interface.

Exit status: 0 on success, 1 for domain errors (one line ``ErrorClass: message``
on stderr), 2 for usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import BenchConfig, SyntheticSpec, run_bench
from .errors import StegoError
from .image_core import read_pgm, write_pgm
from .metrics import format_db, psnr
from .pipeline import capacity_probe, embed_multilayer, extract_multilayer, report_text

MODES = ("inband", "sidecar")
METHODS = ("proposed", "de")


def _layers(parser):
    parser.add_argument("--layers", "-k", type=int, default=1)
    parser.add_argument("--mode", choices=MODES, default="sidecar")
    parser.add_argument("--method", choices=METHODS, default="proposed")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="parity-rdh",
                                description="Reversible parity-pair data hiding for 8-bit PGM images")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("embed", help="hide a payload file in a cover image")
    e.add_argument("--cover", required=True)
    e.add_argument("--payload", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--sidecar", help="map file (required for --mode sidecar)")
    e.add_argument("--trace", help="write the embedding trace report here")
    _layers(e)

    x = sub.add_parser("extract", help="recover the payload and the cover")
    x.add_argument("--stego", required=True)
    x.add_argument("--out", required=True)
    x.add_argument("--sidecar")
    x.add_argument("--recovered", help="write the recovered cover PGM here")
    _layers(x)

    c = sub.add_parser("capacity", help="probe capacity with an all-zero secret")
    c.add_argument("--cover", required=True)
    _layers(c)

    q = sub.add_parser("psnr", help="PSNR between two PGM images")
    q.add_argument("a")
    q.add_argument("b")

    b = sub.add_parser("bench", help="run the capacity/PSNR benchmark")
    b.add_argument("--config", help="YAML or JSON BenchConfig")
    b.add_argument("--images", nargs="*", default=[])
    b.add_argument("--synthetic", nargs="*", default=[],
                   metavar="KIND:HxW[:SEED]", help="e.g. uniform:512x512:1 constant:512x512")
    b.add_argument("--methods", nargs="*", choices=METHODS)
    b.add_argument("--layers", nargs="*", type=int)
    b.add_argument("--mode", choices=MODES)
    b.add_argument("--seed", type=int)
    b.add_argument("--out", help="report path prefix (.json/.csv/.md are written)")
    return p


def parse_synthetic(text: str) -> SyntheticSpec:
    parts = text.split(":")
    if len(parts) not in (2, 3) or "x" not in parts[1]:
        raise ValueError(f"bad synthetic spec {text!r}")
    h, w = (int(v) for v in parts[1].split("x"))
    seed = int(parts[2]) if len(parts) == 3 else 0
    return SyntheticSpec(parts[0], h, w, seed=seed)


def cmd_embed(args) -> int:
    if args.mode == "sidecar" and not args.sidecar:
        raise _Usage("--sidecar is required with --mode sidecar")
    cover = read_pgm(args.cover)
    payload = Path(args.payload).read_bytes()
    X, trace, side = embed_multilayer(cover, payload, args.layers, args.mode, args.method)
    write_pgm(args.out, X)
    if side is not None:
        Path(args.sidecar).write_bytes(side)
    if args.trace:
        Path(args.trace).write_text(report_text(trace, cover, X) + "\n")
    print(f"embedded {len(payload)} bytes in {args.layers} layer(s); "
          f"PSNR {format_db(psnr(cover, X))} dB")
    return 0


def cmd_extract(args) -> int:
    if args.mode == "sidecar" and not args.sidecar:
        raise _Usage("--sidecar is required with --mode sidecar")
    stego = read_pgm(args.stego)
    side = Path(args.sidecar).read_bytes() if args.sidecar else None
    payload, cover = extract_multilayer(stego, args.layers, args.mode, side, args.method)
    Path(args.out).write_bytes(payload)
    if args.recovered:
        write_pgm(args.recovered, cover)
    print(f"extracted {len(payload)} bytes")
    return 0


def cmd_capacity(args) -> int:
    import json

    rep = capacity_probe(read_pgm(args.cover), args.layers, args.mode, args.method)
    print(json.dumps(rep.as_dict(), indent=2))
    return 0


def cmd_psnr(args) -> int:
    print(format_db(psnr(read_pgm(args.a), read_pgm(args.b))))
    return 0


def cmd_bench(args) -> int:
    cfg = BenchConfig.load(args.config) if args.config else BenchConfig()
    if args.images:
        cfg.images = list(args.images)
    if args.synthetic:
        cfg.synthetic = [parse_synthetic(s) for s in args.synthetic]
    for name in ("methods", "layers", "mode", "seed", "out"):
        value = getattr(args, name)
        if value is not None:
            setattr(cfg, name, value)
    if not cfg.images and not cfg.synthetic:
        cfg.synthetic = [SyntheticSpec("uniform", 512, 512, seed=s) for s in range(3)]
    report = run_bench(cfg)
    sys.stdout.write(report.to_markdown())
    return 0


class _Usage(Exception):
    pass


COMMANDS = {"embed": cmd_embed, "extract": cmd_extract, "capacity": cmd_capacity,
            "psnr": cmd_psnr, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (StegoError, OSError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
