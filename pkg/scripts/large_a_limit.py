"""Distance of the deformed k-ellipsoid meridian to the radius-k circle as a grows.

    python scripts/large_a_limit.py --k 0.5 --a 1 10 100 1000
"""

import argparse
import csv
import sys

import numpy as np

from revmap.ellipsoid import distance_to_circle, meridian_z_quadrature, r_bar_max


def vertical_gap(k, a, n=801):
    r = k * np.sin(np.linspace(0.0, 0.5 * np.pi, n))
    circle = k - np.sqrt(np.maximum(k * k - r * r, 0.0))
    return float(np.max(np.abs(meridian_z_quadrature(k, a, r) - circle)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=float, default=0.5)
    ap.add_argument("--a", type=float, nargs="+", default=[1, 10, 100, 1000, 1e4])
    ap.add_argument("--csv", help="also write the table here")
    args = ap.parse_args()

    rows = [(a, r_bar_max(args.k, a), distance_to_circle(args.k, a), vertical_gap(args.k, a)) for a in args.a]
    print(f"{'a':>10} {'r_bar_max':>12} {'normal dist':>12} {'vertical gap':>13}")
    for a, rb, d, v in rows:
        print(f"{a:>10g} {rb:>12.6f} {d:>12.3e} {v:>13.3e}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["a", "r_bar_max", "normal_distance", "vertical_gap"])
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
