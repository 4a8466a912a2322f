"""Command-line front end.

    revmap profile  --k 2 --n 181 --output prof.csv
    revmap deform   --k 0.8 --a 1 --output mer.csv
    revmap metric   --k 0.5 --a 1 --chart r
    revmap geodesic --k 2 --a 0.3 --angle 0.7 --t-end 5
    revmap verify   --k 2 --q 0.3 --geodesics 20 --seed 7
    revmap sweep    --k 0.5 --a-grid 1,10,100

Exit status: 0 all checks passed, 1 checks ran and failed, 2 invalid input.
Floats are written with 17 significant digits.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from revmap import __version__
from revmap.ellipsoid import (
    deformation_summary,
    deformed_surface_metric,
    ellipsoid_profile,
    ellipsoid_r_metric,
    meridian_slope,
    meridian_z_closed,
    meridian_z_quadrature,
    pullback_metric,
)
from revmap.errors import GeometryError, InadmissibleParameterError, StepSizeUnderflow
from revmap.geodesics import (
    GeodesicState,
    integrate_geodesic,
    random_initial_states,
    verify_geodesic_equivalence,
)
from revmap.geometry import (
    classify_topology,
    load_tabulated_profile,
    metric_from_profile,
    pole_smoothness_check,
)
from revmap.mapping import (
    MappingParams,
    admissible_q_range,
    check_q,
    is_nontrivial,
    map_metric,
    verify_levi_civita,
)

RESIDUAL_TOL = 1e-10
CIRCLE_TOL = 1e-10


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    k: Optional[float] = None
    a: Optional[float] = None
    p: float = 1.0
    q: Optional[float] = None
    tol: float = 1e-10
    t_end: float = 5.0
    n: Optional[int] = None
    geodesics: int = 20
    points: int = 100
    seed: int = 0
    input: Optional[str] = None
    output: str = "-"
    format: str = "csv"
    closed_form: bool = False
    chart: str = "r"
    w0: Optional[float] = None
    sigma0: float = 0.0
    angle: float = math.pi / 4
    a_grid: Optional[str] = None
    q_grid: Optional[str] = None
    workers: int = 1

    def record(self) -> dict:
        """Resolved config for reports; worker count does not affect results."""
        d = asdict(self)
        del d["workers"]
        return d

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        fields = cls.__dataclass_fields__
        return cls(**{k: v for k, v in vars(ns).items() if k in fields})


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        # JSON has no inf/nan literals
        return x if math.isfinite(x) else str(x)
    return x


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def emit_table(cfg: RunConfig, columns: list[str], rows, meta: dict) -> None:
    meta = {"version": __version__, "config": cfg.record(), **meta}
    if cfg.format == "json":
        _write(cfg.output, dump_json({"meta": meta, "columns": columns, "rows": [list(r) for r in rows]}))
        return
    lines = [",".join(columns)] + [",".join(fmt(v) for v in row) for row in rows]
    _write(cfg.output, "\n".join(lines) + "\n")
    if cfg.output != "-":
        Path(cfg.output).with_suffix(".json").write_text(dump_json(meta), encoding="utf-8")


def _require_k(cfg):
    if cfg.k is None:
        raise UsageError("--k is required")
    if not cfg.k > 0:
        raise UsageError("k must be positive")


def _profile(cfg):
    if cfg.input is not None:
        return load_tabulated_profile(cfg.input)
    _require_k(cfg)
    return ellipsoid_profile(cfg.k)


def _mapping(cfg) -> MappingParams:
    if cfg.a is not None and cfg.q is not None:
        raise UsageError("give either --q or --a, not both")
    q = cfg.q if cfg.q is not None else (cfg.a if cfg.a is not None else 0.0)
    return MappingParams(cfg.p, q)


def _admissible_or_usage(g, q):
    try:
        check_q(g, q)
    except InadmissibleParameterError as exc:
        lo, hi = exc.interval
        raise UsageError(f"q={fmt(q)} is not admissible; admissible q range is ({fmt(lo)}, {fmt(hi)})") from exc


def cmd_profile(cfg: RunConfig) -> int:
    prof = _profile(cfg)
    n = cfg.n or 181
    if n < 2:
        raise UsageError("--n must be >= 2")
    w = prof.grid(n)
    rows = zip(w, prof.r(w), prof.z(w))
    pole = pole_smoothness_check(prof)
    meta = {
        "kind": prof.kind,
        "domain": list(prof.domain),
        "topology": classify_topology(prof).value,
        "pole_report": {"left": pole.left, "right": pole.right, "values": pole.values},
    }
    emit_table(cfg, ["w", "r", "z"], rows, meta)
    return 0


def cmd_deform(cfg: RunConfig) -> int:
    _require_k(cfg)
    if cfg.a is None:
        raise UsageError("--a is required")
    k, a = cfg.k, cfg.a
    if cfg.closed_form and k > 1:
        raise UsageError("closed form requires k<1")
    n = cfg.n or 101
    r = np.linspace(0.0, k, n)
    z = meridian_z_closed(k, a, r) if cfg.closed_form else meridian_z_quadrature(k, a, r)
    slope = np.append(meridian_slope(k, a, r[:-1]), math.inf)
    meta = deformation_summary(k, a)
    meta["path"] = "closed-form" if cfg.closed_form else "quadrature"
    if k == 1.0:
        dev = float(np.max(np.abs(z - (1.0 - np.sqrt(1.0 - r**2)))))
        meta["circle_deviation"] = dev
        meta["circle_invariant"] = dev < CIRCLE_TOL
    emit_table(cfg, ["r_hat", "z_hat", "slope"], zip(r, z, slope), meta)
    return 0


def cmd_metric(cfg: RunConfig) -> int:
    _require_k(cfg)
    k, a = cfg.k, cfg.a or 0.0
    if cfg.chart == "r":
        g = pullback_metric(k, a) if a else ellipsoid_r_metric(k)
    else:
        g = deformed_surface_metric(k, a)
    n = cfg.n or 101
    r = np.linspace(0.0, k, n + 2)[1:-1]
    emit_table(cfg, ["r", "g_rr", "g_ss"], zip(r, g.a(r), g.b(r)), {"metric": g.name, "chart": cfg.chart})
    return 0


def _base_and_image(cfg):
    g = metric_from_profile(_profile(cfg))
    mp = _mapping(cfg)
    _admissible_or_usage(g, mp.q)
    return g, mp, map_metric(g, mp)


def cmd_geodesic(cfg: RunConfig) -> int:
    g, mp, gbar = _base_and_image(cfg)
    w1, w2 = gbar.domain
    w0 = cfg.w0 if cfg.w0 is not None else 0.5 * (w1 + w2)
    init = GeodesicState.from_direction(gbar, w0, cfg.sigma0, cfg.angle)
    trace = integrate_geodesic(gbar, init, cfg.t_end, cfg.tol)
    clair = trace.clairaut()
    speed = trace.speed()
    rows = (list(y) + [c] for y, c in zip(np.column_stack([trace.t, trace.y]), clair))
    meta = {
        "metric": gbar.name,
        "status": trace.status,
        "steps": trace.steps,
        "rejected": trace.rejected,
        "max_error": trace.max_error,
        "clairaut_drift": trace.clairaut_drift(),
        "speed_drift": float(np.max(np.abs(speed - speed[0]))),
    }
    emit_table(cfg, ["t", "w", "sigma", "w_dot", "sigma_dot", "clairaut"], rows, meta)
    return 0


def _pool_map(fn, items, workers):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def cmd_verify(cfg: RunConfig) -> int:
    g, mp, gbar = _base_and_image(cfg)
    if cfg.points < 1 or cfg.geodesics < 0:
        raise UsageError("--points must be >= 1 and --geodesics >= 0")
    w = g.interior_points(cfg.points)
    residuals = verify_levi_civita(g, mp, w, gbar=gbar)
    residual_max = float(max(np.max(np.abs(r)) for r in residuals))
    lc_passed = residual_max <= RESIDUAL_TOL

    inits = random_initial_states(g, cfg.geodesics, cfg.seed)

    def run(s):
        try:
            rep = verify_geodesic_equivalence(g, mp, s, cfg.t_end, cfg.tol, gbar=gbar)
        except (StepSizeUnderflow, ValueError) as exc:
            return {"init": asdict(s), "passed": False, "error": str(exc)}
        return {"init": asdict(s), **rep.to_dict()}

    reports = _pool_map(run, inits, cfg.workers)
    dev = [r["deviation_max"] for r in reports if "deviation_max" in r]
    drift = [max(r["clairaut_drift"].values()) for r in reports if "clairaut_drift" in r]
    adm = admissible_q_range(g)
    passed = lc_passed and all(r["passed"] for r in reports)
    doc = {
        "version": __version__,
        "config": cfg.record(),
        "metric": g.name,
        "mapping": {"p": mp.p, "q": mp.q, "nontrivial": is_nontrivial(g, mp.q), "signature": adm.signature(mp.q)},
        "admissible_q": {"positive_definite": list(adm.positive_definite_interval)},
        "levi_civita": {"points": cfg.points, "residual_max": residual_max, "passed": lc_passed},
        "geodesics": reports,
        "residual_max": residual_max,
        "deviation_max": max(dev, default=0.0),
        "clairaut_drift": max(drift, default=0.0),
        "passed": passed,
    }
    _write(cfg.output, dump_json(doc))
    return 0 if passed else 1


def _parse_grid(text: Optional[str], name: str) -> list[float]:
    if text is None:
        return []
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--{name} must be a comma-separated list of numbers") from None
    return vals


def cmd_sweep(cfg: RunConfig) -> int:
    if (cfg.a_grid is None) == (cfg.q_grid is None):
        raise UsageError("give exactly one of --a-grid or --q-grid")
    if cfg.a_grid is not None:
        _require_k(cfg)
        grid = _parse_grid(cfg.a_grid, "a-grid")
        if not grid:
            raise UsageError("empty grid")
        g = metric_from_profile(ellipsoid_profile(cfg.k))
        w = g.interior_points(cfg.points)

        def row(a):
            s = deformation_summary(cfg.k, a)
            res = verify_levi_civita(g, MappingParams(1.0 + a * cfg.k**2, a), w)
            return [a, s["r_bar_max"], s["equator_shift"], s["equator_shift_linear"], s["distance_to_circle"],
                    s["closed_vs_quadrature"], max(float(np.max(np.abs(r))) for r in res)]

        cols = ["a", "r_bar_max", "equator_shift", "equator_shift_linear", "distance_to_circle",
                "closed_vs_quadrature", "residual_max"]
        rows = _pool_map(row, grid, cfg.workers)
    else:
        grid = _parse_grid(cfg.q_grid, "q-grid")
        if not grid:
            raise UsageError("empty grid")
        g = metric_from_profile(_profile(cfg))
        for q in grid:
            _admissible_or_usage(g, q)
        w = g.interior_points(cfg.points)
        adm = admissible_q_range(g)

        def row(q):
            res = verify_levi_civita(g, MappingParams(cfg.p, q), w)
            return [q, cfg.p, max(float(np.max(np.abs(r))) for r in res), is_nontrivial(g, q), adm.signature(q)]

        cols = ["q", "p", "residual_max", "nontrivial", "signature"]
        rows = _pool_map(row, grid, cfg.workers)
    emit_table(cfg, cols, rows, {"grid": grid})
    return 0


COMMANDS = {
    "profile": cmd_profile,
    "deform": cmd_deform,
    "metric": cmd_metric,
    "geodesic": cmd_geodesic,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="revmap", description="Metric maps that preserve geodesics on surfaces of revolution.")
    parser.add_argument("--version", action="version", version=f"revmap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, source=True, mapping=False):
        p.add_argument("--k", type=float, help="equatorial semi-axis of the ellipsoid")
        if source:
            p.add_argument("--input", help="tabulated profile CSV with header w,r,z")
        if mapping:
            p.add_argument("--p", type=float, default=1.0)
            p.add_argument("--q", type=float)
            p.add_argument("--a", type=float, help="deformation parameter; same as --p 1 --q A")
        p.add_argument("--output", "-o", default="-")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("profile", help="sample a meridian profile")
    common(p)
    p.add_argument("--n", type=int)

    p = sub.add_parser("deform", help="deformed ellipsoid meridian table")
    common(p, source=False)
    p.add_argument("--a", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--closed-form", action="store_true", help="use the elliptic-integral closed form (k<1)")

    p = sub.add_parser("metric", help="export radius-chart metric coefficients")
    common(p, source=False)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--chart", choices=["r", "rhat"], default="r")
    p.add_argument("--n", type=int)

    p = sub.add_parser("geodesic", help="integrate one geodesic")
    common(p, mapping=True)
    p.add_argument("--w0", type=float)
    p.add_argument("--sigma0", type=float, default=0.0)
    p.add_argument("--angle", type=float, default=math.pi / 4, help="heading off the meridian, radians")
    p.add_argument("--t-end", dest="t_end", type=float, default=5.0)
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("verify", help="Levi-Civita residuals and geodesic equivalence")
    common(p, mapping=True)
    p.add_argument("--geodesics", type=int, default=20)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t-end", dest="t_end", type=float, default=5.0)
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("sweep", help="summary scalars over an a or q grid")
    common(p)
    p.add_argument("--a-grid", dest="a_grid")
    p.add_argument("--q-grid", dest="q_grid")
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--points", type=int, default=100)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    cfg = RunConfig.from_args(ns)
    try:
        return COMMANDS[cfg.command](cfg)
    except (UsageError, GeometryError, ValueError, OSError) as exc:
        print(f"revmap {cfg.command}: error: {exc}", file=sys.stderr)
        return 2
