#!/usr/bin/env python3
"""Render the evolving disk against the central observer's light cone.

Reads the sweep CSV emitted by `hyperflux example1` (columns tau, r0,
theta, t, x, y, causal_class) and writes one PNG per tau value: a 3d
scatter of the disk with non-spacelike nodes flagged in red, under the
forward light cone of the axis observer, whose tip sits at (t, x, y) =
(tau, 0, 0) in every frame.

Frames are keyed by tau in the filename with fixed decimal formatting so
an animation assembles in order.  Rendering is a pure function of the
input CSV: fixed styling, no randomness.
"""

import argparse
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

SWEEP_COLUMNS = ["tau", "r0", "theta", "t", "x", "y", "causal_class"]
CAUSAL_CLASSES = {"spacelike", "timelike", "lightlike", "degenerate"}

SPACELIKE_COLOR = "#2ca02c"
FLAGGED_COLOR = "#d62728"
CONE_COLOR = "#ffcc00"


class SchemaError(Exception):
    pass


def read_sweep(csv_path):
    """Parse the sweep CSV into a list of frames sorted by tau.

    Each frame is a dict with keys tau, r0, theta, t, x, y (arrays) and
    causal_class (list of strings).
    """
    with open(csv_path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        return []
    header, body = rows[0], rows[1:]
    if header != SWEEP_COLUMNS:
        raise SchemaError(f"expected columns {SWEEP_COLUMNS}, found {header}")
    if not body:
        return []
    frames = {}
    for row in body:
        if len(row) != len(SWEEP_COLUMNS):
            raise SchemaError(f"row has {len(row)} fields, expected {len(SWEEP_COLUMNS)}")
        cls = row[6]
        if cls not in CAUSAL_CLASSES:
            raise SchemaError(f"unknown causal class {cls!r}")
        tau = float(row[0])
        frames.setdefault(tau, []).append(
            [float(v) for v in row[:6]] + [cls])
    out = []
    for tau in sorted(frames):
        cols = list(zip(*frames[tau]))
        out.append({
            "tau": tau,
            "r0": np.array(cols[1]),
            "theta": np.array(cols[2]),
            "t": np.array(cols[3]),
            "x": np.array(cols[4]),
            "y": np.array(cols[5]),
            "causal_class": list(cols[6]),
        })
    return out


def nonspacelike_mask(frame):
    return np.array([c != "spacelike" for c in frame["causal_class"]])


def outer_ring_mask(frame, rtol=1e-9):
    r_max = float(np.max(frame["r0"]))
    return np.abs(frame["r0"] - r_max) <= rtol * (1.0 + r_max)


def first_nonspacelike_tau(frames, outer_only=True):
    """Smallest tau whose (outer-ring) nodes include a non-spacelike one."""
    for frame in frames:
        mask = nonspacelike_mask(frame)
        if outer_only:
            mask = mask & outer_ring_mask(frame)
        if np.any(mask):
            return frame["tau"]
    return None


def render_frame(frame, out_path):
    fig = plt.figure(figsize=(6.0, 5.0))
    ax = fig.add_subplot(projection="3d")
    flagged = nonspacelike_mask(frame)
    ax.scatter(frame["x"][~flagged], frame["y"][~flagged], frame["t"][~flagged],
               s=6, color=SPACELIKE_COLOR, label="spacelike")
    if np.any(flagged):
        ax.scatter(frame["x"][flagged], frame["y"][flagged], frame["t"][flagged],
                   s=10, color=FLAGGED_COLOR, label="non-spacelike")

    # forward light cone of the axis observer: tip at (0, 0, tau)
    tau = frame["tau"]
    r_max = float(np.max(frame["r0"]))
    cone_r = np.linspace(0.0, 1.2 * r_max, 12)
    cone_th = np.linspace(0.0, 2.0 * np.pi, 36)
    R, TH = np.meshgrid(cone_r, cone_th)
    ax.plot_wireframe(R * np.cos(TH), R * np.sin(TH), tau + R,
                      color=CONE_COLOR, linewidth=0.4, alpha=0.7)

    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("t")
    ax.set_title(f"tau = {tau:.6f}")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=110)
    plt.close(fig)


def render_frames(csv_path, out_dir):
    """Write one PNG per tau; returns the list of written paths."""
    frames = read_sweep(csv_path)
    if not frames:
        print(f"warning: {csv_path} contains no data rows; no frames written",
              file=sys.stderr)
        return []
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for frame in frames:
        path = os.path.join(out_dir, f"frame_tau_{frame['tau']:.6f}.png")
        render_frame(frame, path)
        written.append(path)
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv_path", help="sweep CSV from 'hyperflux example1'")
    parser.add_argument("out_dir", help="directory for PNG frames")
    args = parser.parse_args(argv)
    try:
        written = render_frames(args.csv_path, args.out_dir)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(written)} frame(s) to {args.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
