#!/usr/bin/env python3
"""Plot sweep CSVs produced by the relaysec CLI.

Usage:
    python scripts/plot_sweeps.py sweep_ratio.csv [more.csv ...]

The x-axis and curve grouping are inferred from the columns; one PNG is
written next to each input file.
"""

import csv
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_table(path: Path):
    meta = {}
    rows = []
    with open(path, newline="") as fh:
        body = []
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                try:
                    meta[key.strip()] = json.loads(value.strip())
                except json.JSONDecodeError:
                    meta[key.strip()] = value.strip()
            else:
                body.append(line)
        for row in csv.DictReader(body):
            rows.append({k: (float(v) if v not in ("", None) and k != "scheme" else v)
                         for k, v in row.items()})
    return meta, rows


def plot_file(path: Path):
    meta, rows = read_table(path)
    if not rows:
        print(f"{path}: no data rows, skipping")
        return
    columns = rows[0].keys()
    if "ratio" in columns:
        x_col, x_label, log_x = "ratio", "source / relay power ratio", True
        y_cols = [("mc_throughput", "-o"), ("analytic_throughput", "--")]
        y_label = "secrecy throughput (bits/slot)"
    elif "snr_db" in columns:
        x_col, x_label, log_x = "snr_db", "total power budget (dB)", False
        y_cols = [("mc_c_max", "-o"), ("analytic_c_max", "--")]
        y_label = "maximum secrecy throughput (bits/slot)"
    else:
        x_col, x_label, log_x = "num_relays", "number of relays", False
        y_cols = [("mc_c_max", "-o"), ("analytic_c_max", "--")]
        y_label = "maximum secrecy throughput (bits/slot)"

    fig, ax = plt.subplots(figsize=(7, 4.5))
    schemes = sorted({row["scheme"] for row in rows})
    for scheme in schemes:
        pts = [row for row in rows if row["scheme"] == scheme]
        xs = [row[x_col] for row in pts]
        for y_col, style in y_cols:
            ys = [row.get(y_col) for row in pts]
            if all(y is None or y == "" for y in ys):
                continue
            suffix = " (analytic)" if y_col.startswith("analytic") else ""
            ax.plot(xs, ys, style, label=f"{scheme}{suffix}", markersize=3)
    if log_x:
        ax.set_xscale("log", base=2)
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    ax.grid(True, alpha=0.4)
    ax.legend()
    command = meta.get("command", "sweep")
    ax.set_title(command)
    out = path.with_suffix(".png")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    print(f"wrote {out}")


def main(argv):
    if len(argv) < 2:
        print(__doc__)
        return 1
    for name in argv[1:]:
        plot_file(Path(name))
    return 0


if __name__ == "__main__":
    raise SystemExit(main(sys.argv))
