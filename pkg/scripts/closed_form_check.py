"""Elliptic-integral meridian height against quadrature.

Also evaluates the variant with the elliptic term divided by (1 - k^2), to show
that only the unit coefficient reproduces the quadrature.

    python scripts/closed_form_check.py
"""

import argparse
import math
import sys

import numpy as np

from revmap.ellipsoid import meridian_z_closed, meridian_z_quadrature


def algebraic_part(k, a, r):
    u = k * k - np.asarray(r, float) ** 2
    return -np.sqrt(u) / k * np.sqrt((1 + a * k * k * u) / (1 + a * u)) + math.sqrt((1 + a * k**4) / (1 + a * k * k))


def variant(k, a, r):
    alg = algebraic_part(k, a, r)
    return alg + (meridian_z_closed(k, a, r) - alg) / (1.0 - k * k)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=float, nargs="+", default=[0.3, 0.5, 0.8])
    ap.add_argument("--a", type=float, nargs="+", default=[0.1, 1.0, 10.0])
    ap.add_argument("--n", type=int, default=10)
    args = ap.parse_args()

    print(f"{'k':>5} {'a':>6} {'closed - quad':>14} {'variant - quad':>15}")
    for k in args.k:
        r = np.linspace(0.0, k, args.n)
        for a in args.a:
            quad = meridian_z_quadrature(k, a, r)
            d1 = np.max(np.abs(meridian_z_closed(k, a, r) - quad))
            d2 = np.max(np.abs(variant(k, a, r) - quad))
            print(f"{k:>5g} {a:>6g} {d1:>14.2e} {d2:>15.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
