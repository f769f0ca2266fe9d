"""Sample: plot a sweep CSV written by ``aoipreempt sweep``.

    python docs/plot_sweep.py aoi_vs_q.csv aoi_vs_q.png --xlabel "arrival probability q"

Not part of the package; needs matplotlib.
"""
import argparse
import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("csv")
    parser.add_argument("png")
    parser.add_argument("--xlabel", default="parameter")
    args = parser.parse_args()

    curves = defaultdict(list)
    with open(args.csv, newline="") as fh:
        for row in csv.DictReader(fh):
            curves[row["family"]].append((float(row["param"]), float(row["delta_bar"])))

    fig, ax = plt.subplots(figsize=(5, 3.5))
    for family, pts in sorted(curves.items()):
        xs, ys = zip(*sorted(pts))
        ax.plot(xs, ys, marker="o", markersize=3, label=family.upper())
    ax.set_xlabel(args.xlabel)
    ax.set_ylabel("average AoI")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(args.png, dpi=150)


if __name__ == "__main__":
    main()
