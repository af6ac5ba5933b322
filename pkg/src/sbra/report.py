"""Figure rendering for sweep output: median loss versus horizon length.

Reads the detailed sweep CSV (one row per topology/n/k/algo/seed cell),
aggregates the median loss over seeds, and draws one figure per
(topology, n) pair with a line per algorithm. Rendering uses the Agg
backend so it works headless.
"""

from __future__ import annotations

import csv
import os
import statistics
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_GB = 1e9


def read_sweep_rows(path: str) -> list[dict]:
    """Sweep CSV rows as dicts, skipping '#' comment lines and failed cells."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(line for line in fh if not line.startswith("#"))
        for row in reader:
            if row.get("status", "ok") != "ok":
                continue
            rows.append(row)
    return rows


def median_losses(rows) -> dict[tuple, dict[int, float]]:
    """{(topology, n, algo): {k: median loss_bytes}} over seeds."""
    cells = defaultdict(list)
    for r in rows:
        key = (r["topology"], int(r["n"]), r["algo"], int(r["k"]))
        cells[key].append(int(r["loss_bytes"]))
    out: dict[tuple, dict[int, float]] = defaultdict(dict)
    for (topology, n, algo, k), losses in cells.items():
        out[(topology, n, algo)][k] = statistics.median(losses)
    return out


def render_sweep_figures(sweep_csv: str, out_dir: str) -> list[str]:
    """One loss-vs-K PNG per (topology, n); returns the written paths."""
    rows = read_sweep_rows(sweep_csv)
    if not rows:
        raise ValueError(f"no usable rows in {sweep_csv}")
    medians = median_losses(rows)
    groups = sorted({(topo, n) for topo, n, _ in medians})
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for topo, n in groups:
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        algos = sorted(a for t, nn, a in medians if (t, nn) == (topo, n))
        for algo in algos:
            series = medians[(topo, n, algo)]
            ks = sorted(series)
            ax.plot(ks, [series[k] / _GB for k in ks], marker="o", label=algo)
        ax.set_xlabel("slots available (K)")
        ax.set_ylabel("median total loss (GB)")
        ax.set_title(f"{topo}, {n} interfaces/node")
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.tight_layout()
        path = os.path.join(out_dir, f"loss_vs_k_{topo}_n{n}.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
