"""Monte-Carlo check that an ellipsoid metric and its (p, q) images share geodesics.

    python scripts/equivalence_suite.py --k 2 --q 0.1 0.3 1 --n 20 --seed 12345
"""

import argparse
import sys
import time

from revmap.ellipsoid import ellipsoid_metric_phi
from revmap.geodesics import random_initial_states, verify_geodesic_equivalence
from revmap.mapping import MappingParams, map_metric


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=float, default=2.0)
    ap.add_argument("--p", type=float, default=1.0)
    ap.add_argument("--q", type=float, nargs="+", default=[0.1, 0.3, 1.0])
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--seed", type=int, default=12345)
    ap.add_argument("--tol", type=float, default=1e-10)
    ap.add_argument("--t-end", type=float, default=5.0)
    args = ap.parse_args()

    g = ellipsoid_metric_phi(args.k)
    inits = random_initial_states(g, args.n, args.seed)
    print(f"{'q':>8} {'passed':>8} {'max dev':>10} {'max drift':>10} {'time':>7}")
    failures = 0
    for q in args.q:
        mp = MappingParams(args.p, q)
        gbar = map_metric(g, mp)
        t0 = time.perf_counter()
        reps = [verify_geodesic_equivalence(g, mp, s, args.t_end, args.tol, gbar=gbar) for s in inits]
        ok = sum(r.passed for r in reps)
        failures += len(reps) - ok
        dev = max(r.max_transverse_deviation for r in reps)
        drift = max(max(r.clairaut_drift_g, r.clairaut_drift_gbar) for r in reps)
        print(f"{q:>8g} {ok:>4}/{len(reps):<3} {dev:>10.2e} {drift:>10.2e} {time.perf_counter() - t0:>6.1f}s")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
