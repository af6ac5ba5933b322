"""Sweep CSV aggregation and figure rendering."""

import os

import pytest

from sbra.report import median_losses, read_sweep_rows, render_sweep_figures

HEADER = "topology,n,k,algo,seed,loss_bytes,loss_mbps_slots,runtime_ms,status\n"

ROWS = (
    "# sweep 2026-01-01\n"
    + HEADER
    + "grid,3,19,greedy,0,1000,0.04,12.5,ok\n"
    + "grid,3,19,greedy,1,3000,0.12,11.0,ok\n"
    + "grid,3,19,greedy,2,2000,0.08,13.1,ok\n"
    + "grid,3,21,greedy,0,500,0.02,12.0,ok\n"
    + "grid,3,19,all-fixed,0,9000,0.36,2.0,ok\n"
    + "grid,3,19,oracle,0,0,0,1.0,OracleRefusal: too large\n"
    + "hex-small,4,19,greedy,0,4000,0.16,20.0,ok\n"
)


@pytest.fixture()
def sweep_csv(tmp_path):
    path = tmp_path / "sweep.csv"
    path.write_text(ROWS)
    return str(path)


def test_read_rows_skips_comments_and_failures(sweep_csv):
    rows = read_sweep_rows(sweep_csv)
    assert len(rows) == 6
    assert all(r["status"] == "ok" for r in rows)
    assert {r["algo"] for r in rows} == {"greedy", "all-fixed"}


def test_median_over_seeds(sweep_csv):
    med = median_losses(read_sweep_rows(sweep_csv))
    assert med[("grid", 3, "greedy")] == {19: 2000, 21: 500}
    assert med[("grid", 3, "all-fixed")] == {19: 9000}
    assert med[("hex-small", 4, "greedy")] == {19: 4000}


def test_render_writes_one_png_per_group(sweep_csv, tmp_path):
    out = tmp_path / "figs"
    written = render_sweep_figures(sweep_csv, str(out))
    names = sorted(os.path.basename(p) for p in written)
    assert names == ["loss_vs_k_grid_n3.png", "loss_vs_k_hex-small_n4.png"]
    for p in written:
        assert os.path.getsize(p) > 1000  # a real image, not a stub


def test_render_refuses_empty_input(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("# nothing\n" + HEADER)
    with pytest.raises(ValueError, match="no usable rows"):
        render_sweep_figures(str(path), str(tmp_path))
