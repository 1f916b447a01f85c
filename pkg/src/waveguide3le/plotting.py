"""Render the CSV datasets of a run as PNG figures."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

__all__ = ["plot_dataset", "render_run", "PLOT_SCRIPT"]

PLOT_SCRIPT = '''"""Redraw every dataset in this directory as a PNG figure."""
from pathlib import Path

from waveguide3le.plotting import render_run

if __name__ == "__main__":
    for png in render_run(Path(__file__).resolve().parent):
        print(png)
'''


def _read(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(c) if c else np.nan for c in row] for row in body], dtype=float).reshape(-1, len(header))
    return header, data


def plot_dataset(csv_path, entry: dict, png_path):
    """One figure per dataset; extra sweep columns become separate curves."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    header, data = _read(csv_path)
    sweep = entry["sweep_columns"]
    grid = entry["grid_column"]
    values = [c for c in entry["value_columns"] if not c.endswith("_opt") and c != "clamped"]
    if grid:
        x_col, group_cols = grid, sweep
    elif sweep:
        x_col, group_cols = sweep[0], sweep[1:]
    else:
        x_col, group_cols = None, []
    fig, axes = plt.subplots(len(values), 1, figsize=(6, 2.6 * len(values)), squeeze=False, sharex=True)
    groups = {}
    for row in data:
        key = tuple(row[header.index(c)] for c in group_cols)
        groups.setdefault(key, []).append(row)
    for ax, col in zip(axes[:, 0], values):
        for key, rows in groups.items():
            rows = np.array(rows)
            y = rows[:, header.index(col)]
            label = ", ".join(f"{c}={v:.3g}" for c, v in zip(group_cols, key)) or None
            if x_col is None:
                ax.plot(np.zeros_like(y), y, "o", label=label)
            else:
                ax.plot(rows[:, header.index(x_col)], y, label=label)
        ax.set_ylabel(col)
        if len(groups) > 1:
            ax.legend(fontsize="small")
    axes[-1, 0].set_xlabel(x_col or "")
    fig.suptitle(f"{entry['observable']} ({entry['topology']})")
    fig.tight_layout()
    fig.savefig(png_path, dpi=110)
    plt.close(fig)
    return Path(png_path)


def render_run(out_dir):
    """Draw every dataset listed in the run manifest; returns the PNG paths."""
    out_dir = Path(out_dir)
    manifest = json.loads((out_dir / "manifest.json").read_text(encoding="utf-8"))
    written = []
    for entry in manifest["datasets"]:
        csv_path = out_dir / entry["file"]
        written.append(plot_dataset(csv_path, entry, csv_path.with_suffix(".png")))
    return written
