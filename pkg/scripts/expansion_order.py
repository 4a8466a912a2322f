"""Convergence order of the first-order-in-a meridian expansion.

    python scripts/expansion_order.py --k 0.5 0.8 2
"""

import argparse
import sys

import numpy as np

from revmap.ellipsoid import equator_shift_linear, meridian_z_quadrature, small_a_expansion


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=float, nargs="+", default=[0.5, 0.8, 2.0])
    ap.add_argument("--a", type=float, nargs="+", default=[1e-1, 1e-2, 1e-3, 1e-4])
    ap.add_argument("--n", type=int, default=41, help="radius samples")
    args = ap.parse_args()
    a_vals = np.array(args.a)

    for k in args.k:
        r = np.linspace(0.0, k, args.n)
        errs = []
        print(f"k = {k}")
        print(f"  {'a':>8} {'max |err|':>12} {'shift':>14} {'linear':>14} {'rel/a':>8}")
        for a in a_vals:
            exact = meridian_z_quadrature(k, a, r)
            err = float(np.max(np.abs(exact - small_a_expansion(k, r, a))))
            errs.append(err)
            shift, lin = exact[-1] - 1.0, equator_shift_linear(k, a)
            print(f"  {a:>8.0e} {err:>12.3e} {shift:>14.6e} {lin:>14.6e} {abs(shift - lin) / abs(lin) / a:>8.3f}")
        slope = np.polyfit(np.log(a_vals), np.log(errs), 1)[0]
        print(f"  log-log slope of the error: {slope:.3f}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
