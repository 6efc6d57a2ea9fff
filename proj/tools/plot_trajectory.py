#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Top-view plot of a trajectory table (rows: m t x y z ugv rate).

Dev convenience only: ./wspsocm run ... --trajectory-out traj.txt
then python3 tools/plot_trajectory.py traj.txt out.png
"""
import sys
from collections import defaultdict


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 1
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed", file=sys.stderr)
        return 1

    paths = defaultdict(list)
    with open(sys.argv[1]) as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            m, _t, x, y, z, _ugv, _rate = line.split()
            paths[int(m)].append((float(x), float(y), float(z)))

    fig, ax = plt.subplots(figsize=(6, 9))
    for m, pts in sorted(paths.items()):
        xs, ys = [p[0] for p in pts], [p[1] for p in pts]
        ax.plot(xs, ys, marker="o", markersize=2.5, label=f"uav {m}")
        ax.annotate("start", (xs[0], ys[0]), fontsize=7)
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_aspect("equal")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(sys.argv[2], dpi=150)
    print(f"wrote {sys.argv[2]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
