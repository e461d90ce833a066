import json

import numpy as np

from parity_rdh.bench import BenchConfig, BenchRow, SyntheticSpec, run_bench
from parity_rdh.image_core import write_pgm
from parity_rdh import synthetic


def small_cfg(**kw):
    base = dict(synthetic=[SyntheticSpec("uniform", 32, 32, seed=1),
                           SyntheticSpec("constant", 32, 32)],
                layers=[1, 2], seed=11)
    base.update(kw)
    return BenchConfig(**base)


def test_rows_roundtrip_and_columns():
    rep = run_bench(small_cfg())
    assert len(rep.rows) == 2 * 2 * 2
    assert all(r.ok and not r.error for r in rep.rows)
    header = rep.to_csv().splitlines()[0].split(",")
    for name in ("image", "method", "k", "gross_bpp", "net_bpp", "sidecar_bpp", "psnr_db", "ok"):
        assert name in header


def test_deterministic_modulo_timing():
    a = run_bench(small_cfg()).to_json(timing=False)
    b = run_bench(small_cfg()).to_json(timing=False)
    assert a == b
    assert "embed_s" not in json.loads(a)["rows"][0]


def test_constant_de_half_bpp():
    rep = run_bench(BenchConfig(synthetic=[SyntheticSpec("constant", 64, 64)],
                                methods=["de"], layers=[1]))
    assert rep.rows[0].gross_bpp == 0.5


def test_inband_errors_are_rows_not_crashes():
    rep = run_bench(small_cfg(mode="inband", methods=["proposed"], layers=[1]))
    assert all(r.error for r in rep.rows if r.image.startswith("uniform"))
    assert "InsufficientCapacity" in rep.to_markdown() or "OverlapViolation" in rep.to_markdown()


def test_images_from_disk(tmp_path):
    p = tmp_path / "lena_like.pgm"
    write_pgm(p, synthetic.gradient(24, 24))
    rep = run_bench(BenchConfig(images=[str(p)], layers=[1], methods=["proposed"]))
    assert rep.rows[0].image == "lena_like" and rep.rows[0].ok


def test_claim_check_strings():
    row = BenchRow("x", "proposed", 1, gross_bpp=0.56, psnr_db=54.7)
    assert row.claim_check() == ">0.5bpp:yes >54dB:yes"
    row = BenchRow("x", "proposed", 2, gross_bpp=1.2, psnr_db=52.0)
    assert row.claim_check() == "~1bpp:NO >53dB:NO"
    assert BenchRow("x", "de", 1).claim_check() == ""


def test_write_outputs(tmp_path):
    rep = run_bench(small_cfg(layers=[1], methods=["de"], out=str(tmp_path / "r")))
    data = json.loads((tmp_path / "r.json").read_text())
    assert len(data["rows"]) == 2
    assert (tmp_path / "r.md").read_text() == rep.to_markdown()
