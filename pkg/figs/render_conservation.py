#!/usr/bin/env python3
"""Plot conservation-sweep totals and residuals with error bands.

Reads the CSV emitted by `hyperflux sweep` (columns tau, total,
error_estimate, residual) and writes a single PNG: the total P(tau) with
its error band on top, drift residuals below.
"""

import argparse
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

SWEEP_COLUMNS = ["tau", "total", "error_estimate", "residual"]

# The plotted band adds a fixed round-off floor (relative to the initial
# total) to the reported quadrature estimates: totals conserved to machine
# precision then render as flat instead of as band violations, while any
# physically meaningful drift (orders of magnitude above this) still bursts
# the band.
BAND_FLOOR_REL = 1e-9


class SchemaError(Exception):
    pass


def read_conservation(csv_path):
    with open(csv_path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise SchemaError("CSV has no header row")
    header, body = rows[0], rows[1:]
    if header != SWEEP_COLUMNS:
        raise SchemaError(f"expected columns {SWEEP_COLUMNS}, found {header}")
    data = np.array([[float(v) for v in row] for row in body], dtype=float)
    if data.size == 0:
        data = data.reshape(0, len(SWEEP_COLUMNS))
    return {
        "tau": data[:, 0],
        "total": data[:, 1],
        "error_estimate": data[:, 2],
        "residual": data[:, 3],
    }


def band_half_width(table):
    floor = BAND_FLOOR_REL * max(1.0, abs(table["total"][0])) if len(table["tau"]) else 0.0
    return table["error_estimate"] + floor


def flat_within_band(table) -> bool:
    """True when every total stays inside the plotted band around the first."""
    if len(table["tau"]) == 0:
        return True
    band = band_half_width(table) + band_half_width(table)[0]
    return bool(np.all(np.abs(table["total"] - table["total"][0]) <= band))


def render_conservation(csv_path, out_path):
    table = read_conservation(csv_path)
    fig, (ax_top, ax_bot) = plt.subplots(
        2, 1, figsize=(6.4, 5.4), sharex=True,
        gridspec_kw={"height_ratios": [2, 1]})
    tau, total = table["tau"], table["total"]
    marker = "o" if len(tau) <= 1 else None
    ax_top.plot(tau, total, color="#1f77b4", marker=marker, label="total")
    if len(tau) > 0:
        band = band_half_width(table)
        ax_top.fill_between(tau, total - band, total + band,
                            color="#1f77b4", alpha=0.25, label="error band")
    ax_top.set_ylabel("total")
    ax_top.legend(loc="best", fontsize=8)

    ax_bot.plot(tau, table["residual"], color="#d62728", marker=marker)
    ax_bot.set_xlabel("tau")
    ax_bot.set_ylabel("|P - P0|")
    ax_bot.set_yscale("symlog", linthresh=1e-12)
    fig.tight_layout()
    os.makedirs(os.path.dirname(out_path) or ".", exist_ok=True)
    fig.savefig(out_path, dpi=110)
    plt.close(fig)
    return table


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv_path", help="conservation CSV from 'hyperflux sweep'")
    parser.add_argument("out_path", help="output PNG path")
    args = parser.parse_args(argv)
    try:
        table = render_conservation(args.csv_path, args.out_path)
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    flat = flat_within_band(table)
    print(f"wrote {args.out_path}; flat within band: {flat}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
