import csv
import math

import pytest

from kpii_ist import pipeline
from kpii_ist.config import parse_config

SMALL = """
[datum]
profile = {profile}
[physical]
count = 32
[spectral]
count = 16
[direct]
length_1 = 64
length_2 = 32
spacing = 0.5
dt = 0.1
sponge = 8
[ray]
a = {a}
t2 = -0.5, 0.5
times = 1, 2
[tolerances]
second_order_box = 16
"""


def small(profile="gaussian_dxx", a=-3):
    return parse_config(SMALL.format(profile=profile, a=a))


def test_forward_is_deterministic(tmp_path):
    cfg = small()
    pipeline.run_forward(cfg, tmp_path / "a")
    pipeline.run_forward(cfg, tmp_path / "b")
    assert (tmp_path / "a" / "scattering.kpsc").read_bytes() == (tmp_path / "b" / "scattering.kpsc").read_bytes()


def test_zero_datum_gives_zero_report(tmp_path):
    report = pipeline.run_compare(small("zero"), tmp_path)
    assert all(r.u_direct == 0 and r.u_reconstructed == 0 and r.u_leading == 0 for r in report.rows)
    assert not any(r.failure for r in report.rows)
    assert (tmp_path / "report.csv").exists()


def test_report_identical_across_thread_counts(tmp_path):
    cfg = small()
    grid = pipeline.run_forward(cfg)
    states = pipeline.run_evolve(cfg)
    pipeline.run_compare(cfg, tmp_path / "one", threads=1, grid=grid, states=states)
    pipeline.run_compare(cfg, tmp_path / "two", threads=2, grid=grid, states=states)
    assert (tmp_path / "one" / "report.csv").read_bytes() == (tmp_path / "two" / "report.csv").read_bytes()
    rows = list(csv.reader(open(tmp_path / "one" / "report.csv")))
    assert rows[0][0].startswith("# ") and "config=" in rows[0][0]
    assert tuple(rows[1]) == pipeline.ComparisonReport.COLUMNS
    assert len(rows) == 2 + 4
    assert sorted(p.name for p in (tmp_path / "one").glob("residuals_*.dat")) == \
        ["residuals_t2_+0.5.dat", "residuals_t2_-0.5.dat"]


def test_failures_are_tagged_per_row(tmp_path):
    report = pipeline.run_compare(small(a=0.5))  # |a| below the regime threshold
    assert all("leading:OutsideAsymptoticRegime" in r.failure for r in report.rows)
    assert all(r.u_direct is not None and r.u_reconstructed is not None for r in report.rows)
    assert report.ray_norm(1.0, "leading") is None
    assert report.ray_norm(1.0, "reconstructed") >= 0


def test_evolve_writes_checkpoints(tmp_path):
    states = pipeline.run_evolve(small(), tmp_path)
    assert set(states) == {1.0, 2.0}
    assert (tmp_path / "direct_t1.kpgrid").exists() and (tmp_path / "direct_t2.kpgrid").exists()
    assert states[2.0].t == pytest.approx(2.0)


def test_ray_positions_and_lattices():
    cfg = small()
    pos = pipeline.ray_positions(cfg)
    assert [(t, t2) for t, t2, _ in pos] == [(1, -0.5), (1, 0.5), (2, -0.5), (2, 0.5)]
    assert pipeline.direct_lattice(cfg).shape == (128, 64)
    t, t2, x = pos[3]
    assert math.isclose(x[0], (cfg.a - t2 ** 2 / 3) * t)
