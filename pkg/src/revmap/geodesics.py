"""Geodesics of equidistant metrics in (w, sigma) coordinates.

Geodesic equations of a dw^2 + b dsigma^2:

    w''     = -G^w_ww w'^2 - G^w_ss sigma'^2
    sigma'' = -2 G^s_ws w' sigma'

integrated with an adaptive Dormand-Prince 5(4) pair. The chart degenerates
where b -> 0 (poles), so integration stops inside a guard band there and at
the ends of the parameter domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial.legendre import leggauss

from revmap.errors import InadmissibleParameterError, PoleContact, StepSizeUnderflow
from revmap.geometry import EquidistantMetric, b_extrema
from revmap.mapping import MappingParams, admissible_q_range, christoffel, map_metric

POLE_GUARD = 1e-10
EDGE_BAND = 1e-6

COMPLETED = "completed"
POLE_CONTACT = "pole-contact"
CHART_EDGE = "chart-edge"

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array(_A[6] + [0.0])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])


@dataclass(frozen=True)
class GeodesicState:
    w: float
    sigma: float
    w_dot: float
    sigma_dot: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.w, self.sigma, self.w_dot, self.sigma_dot)):
            raise ValueError(f"non-finite geodesic state {self}")
        if self.w_dot == 0 and self.sigma_dot == 0:
            raise ValueError("geodesic state needs a nonzero velocity")

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.sigma, self.w_dot, self.sigma_dot])

    @classmethod
    def from_array(cls, y) -> "GeodesicState":
        return cls(*(float(v) for v in y))

    @classmethod
    def from_direction(cls, g: EquidistantMetric, w: float, sigma: float, angle: float, speed: float = 1.0):
        """State at (w, sigma) heading ``angle`` off the meridian, g-speed ``speed``."""
        a, b = float(g.a(w)), float(g.b(w))
        return cls(w, sigma, speed * math.cos(angle) / math.sqrt(a), speed * math.sin(angle) / math.sqrt(b))


@dataclass(frozen=True, eq=False)
class GeodesicTrace:
    """Integrated geodesic: states ``y[i] = (w, sigma, w_dot, sigma_dot)`` at ``t[i]``."""

    t: np.ndarray
    y: np.ndarray
    metric: EquidistantMetric = field(repr=False)
    status: str = COMPLETED
    steps: int = 0
    rejected: int = 0
    max_error: float = 0.0

    @property
    def metric_id(self) -> str:
        return self.metric.name

    @property
    def samples(self) -> list[tuple[float, GeodesicState]]:
        return [(float(t), GeodesicState.from_array(y)) for t, y in zip(self.t, self.y)]

    @property
    def final_state(self) -> GeodesicState:
        return GeodesicState.from_array(self.y[-1])

    def speed(self) -> np.ndarray:
        w, _, wd, sd = self.y.T
        return np.sqrt(self.metric.a(w) * wd**2 + self.metric.b(w) * sd**2)

    def clairaut(self) -> np.ndarray:
        w, _, wd, sd = self.y.T
        return clairaut_invariant(self.metric, (w, None, wd, sd))

    def clairaut_drift(self) -> float:
        c = self.clairaut()
        return float(np.max(np.abs(c - c[0])))

    def accelerations(self) -> np.ndarray:
        w, _, wd, sd = self.y.T
        return np.column_stack(_accel(self.metric, w, wd, sd))


@dataclass(frozen=True)
class EquivalenceReport:
    max_transverse_deviation: float
    clairaut_drift_g: float
    clairaut_drift_gbar: float
    passed: bool
    tolerances: dict
    status_g: str = COMPLETED
    status_gbar: str = COMPLETED

    def to_dict(self) -> dict:
        return {
            "deviation_max": self.max_transverse_deviation,
            "clairaut_drift": {"g": self.clairaut_drift_g, "gbar": self.clairaut_drift_gbar},
            "passed": self.passed,
            "tolerances": dict(self.tolerances),
            "status": {"g": self.status_g, "gbar": self.status_gbar},
        }


def _accel(g, w, wd, sd):
    c = christoffel(g, w)
    return -c.g_w_ww * wd**2 - c.g_w_ss * sd**2, -2.0 * c.g_s_ws * wd * sd


def _b_guard(g: EquidistantMetric, pole_guard: float) -> float:
    return pole_guard * b_extrema(g)[3]


def geodesic_rhs(g: EquidistantMetric, s: GeodesicState, *, pole_guard: float = POLE_GUARD):
    """(w', sigma', w'', sigma''); raises PoleContact inside the pole guard band."""
    if float(g.b(s.w)) < _b_guard(g, pole_guard):
        raise PoleContact(s.w)
    wdd, sdd = _accel(g, s.w, s.w_dot, s.sigma_dot)
    return s.w_dot, s.sigma_dot, float(wdd), float(sdd)


def clairaut_invariant(g: EquidistantMetric, s) -> float:
    """b(w) dsigma/ds with arc-length normalization; constant along geodesics."""
    if isinstance(s, GeodesicState):
        w, wd, sd = s.w, s.w_dot, s.sigma_dot
    else:
        w, _, wd, sd = s
    b = g.b(w)
    speed = np.sqrt(g.a(w) * np.square(wd) + b * np.square(sd))
    if np.any(speed == 0):
        raise ValueError("Clairaut invariant undefined for a zero-speed state")
    return b * sd / speed


def _rms(err, y0, y1, tol):
    sc = tol * (1.0 + np.maximum(np.abs(y0), np.abs(y1)))
    return math.sqrt(float(np.mean((err / sc) ** 2)))


def integrate_geodesic(
    g: EquidistantMetric,
    init: GeodesicState,
    t_end: float,
    tol: float = 1e-10,
    *,
    pole_guard: float = POLE_GUARD,
    edge_band: float = EDGE_BAND,
    max_steps: int = 1_000_000,
) -> GeodesicTrace:
    """Adaptive Dormand-Prince 5(4) integration from t=0 to ``t_end``.

    Every accepted step is kept as a sample. Stops early, with status
    ``pole-contact`` or ``chart-edge``, when the next state would enter the
    pole guard band (b < pole_guard * max b) or the edge band of the domain.
    """
    if not (tol > 0 and t_end > 0):
        raise ValueError("need tol > 0 and t_end > 0")
    w1, w2 = g.domain
    band = edge_band * (w2 - w1)
    lo, hi = w1 + band, w2 - band
    b_min = _b_guard(g, pole_guard)

    def outside(w):
        if not lo < w < hi:
            end = w1 if w <= lo else w2
            return POLE_CONTACT if float(g.b(end)) < b_min else CHART_EDGE
        if float(g.b(w)) < b_min:
            return POLE_CONTACT
        return None

    if outside(init.w):
        raise ValueError(f"initial point w={init.w!r} lies in the guard band")

    def f(y):
        wdd, sdd = _accel(g, y[0], y[2], y[3])
        return np.array([y[2], y[3], float(wdd), float(sdd)])

    t = 0.0
    y = init.as_array()
    k1 = f(y)
    ts, ys = [t], [y]
    steps = rejected = 0
    max_err = 0.0
    status = COMPLETED

    # initial step (Hairer, Norsett & Wanner II.4)
    sc = tol * (1.0 + np.abs(y))
    d0, d1 = np.linalg.norm(y / sc), np.linalg.norm(k1 / sc)
    h = 1e-6 if min(d0, d1) < 1e-5 else 0.01 * d0 / d1
    h = min(h, t_end, 0.1)

    while t < t_end:
        if steps + rejected >= max_steps:
            raise StepSizeUnderflow(f"max_steps={max_steps} exceeded at t={t!r}", GeodesicState.from_array(y))
        if h < 1e-14 * max(1.0, abs(t)):
            trace = GeodesicTrace(np.array(ts), np.array(ys), g, status, steps, rejected, max_err)
            raise StepSizeUnderflow(f"step size underflow at t={t!r}", GeodesicState.from_array(y), trace)
        h = min(h, t_end - t)
        ks = [k1]
        ok = True
        with np.errstate(all="ignore"):
            try:
                for i in range(1, 7):
                    yi = y + h * sum(a * k for a, k in zip(_A[i], ks))
                    ks.append(f(yi))
            except ValueError:
                # christoffel() refuses b <= 0 stages
                ok = False
        if ok:
            y_new = y + h * sum(bi * k for bi, k in zip(_B, ks))
            err_vec = h * sum(ei * k for ei, k in zip(_E, ks))
            err = _rms(err_vec, y, y_new, tol)
            ok = math.isfinite(err) and np.all(np.isfinite(y_new))
        if not ok:
            rejected += 1
            h *= 0.25
            continue
        if err <= 1.0:
            where = outside(y_new[0])
            if where:
                # creep up to the band before giving up
                if h > 1e-9 * max(1.0, t):
                    h *= 0.5
                    continue
                status = where
                break
            t += h
            y = y_new
            k1 = ks[6]
            steps += 1
            max_err = max(max_err, err * tol)
            ts.append(t)
            ys.append(y)
            fac = 5.0 if err == 0 else min(5.0, 0.9 * err**-0.2)
        else:
            rejected += 1
            fac = max(0.2, 0.9 * err**-0.2)
        h *= fac

    return GeodesicTrace(np.array(ts), np.array(ys), g, status, steps, rejected, max_err)


# quintic Hermite basis on [0, 1]: p0, h v0, h^2 a0, h^2 a1, h v1, p1
def _hermite5(s):
    s2, s3 = s * s, s * s * s
    s4, s5 = s3 * s, s3 * s2
    return (
        1 - 10 * s3 + 15 * s4 - 6 * s5,
        s - 6 * s3 + 8 * s4 - 3 * s5,
        0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5,
        0.5 * s3 - s4 + 0.5 * s5,
        -4 * s3 + 7 * s4 - 3 * s5,
        10 * s3 - 15 * s4 + 6 * s5,
    )


def _hermite5_ds(s):
    s2, s3, s4 = s * s, s * s * s, s**4
    return (
        -30 * s2 + 60 * s3 - 30 * s4,
        1 - 18 * s2 + 32 * s3 - 15 * s4,
        s - 4.5 * s2 + 6 * s3 - 2.5 * s4,
        1.5 * s2 - 4 * s3 + 2.5 * s4,
        -12 * s2 + 28 * s3 - 15 * s4,
        30 * s2 - 60 * s3 + 30 * s4,
    )


class _DenseCurve:
    """C^2 piecewise quintic through trace samples, parameter u in [0, n-1]."""

    def __init__(self, trace: GeodesicTrace):
        self.t = trace.t
        self.p = trace.y[:, :2]
        self.v = trace.y[:, 2:]
        self.acc = trace.accelerations()
        self.h = np.diff(self.t)
        self.n = len(self.t)

    def _split(self, u):
        i = np.clip(np.floor(u).astype(int), 0, self.n - 2)
        return i, (u - i)[:, None]

    def __call__(self, u):
        i, s = self._split(np.asarray(u, dtype=float))
        h = self.h[i][:, None]
        H = _hermite5(s)
        return (H[0] * self.p[i] + H[1] * h * self.v[i] + H[2] * h**2 * self.acc[i]
                + H[3] * h**2 * self.acc[i + 1] + H[4] * h * self.v[i + 1] + H[5] * self.p[i + 1])

    def velocity(self, u):
        """d/dt of the interpolant."""
        i, s = self._split(np.asarray(u, dtype=float))
        h = self.h[i][:, None]
        D = _hermite5_ds(s)
        dpds = (D[0] * self.p[i] + D[1] * h * self.v[i] + D[2] * h**2 * self.acc[i]
                + D[3] * h**2 * self.acc[i + 1] + D[4] * h * self.v[i + 1] + D[5] * self.p[i + 1])
        return dpds / h

    def cumulative_length(self, g: EquidistantMetric, nodes: int = 8) -> np.ndarray:
        """g-length from the start to each sample, Gauss-Legendre per segment."""
        x, wts = leggauss(nodes)
        seg = np.arange(self.n - 1)[:, None] + 0.5 * (x + 1.0)
        u = seg.ravel()
        pos, vel = self(u), self.velocity(u)
        speed = np.sqrt(g.a(pos[:, 0]) * vel[:, 0] ** 2 + g.b(pos[:, 0]) * vel[:, 1] ** 2)
        seg_len = 0.5 * self.h * (speed.reshape(-1, nodes) @ wts)
        return np.concatenate([[0.0], np.cumsum(seg_len)])


def _nearest_distance(g, queries, curve: _DenseCurve, subdivisions: int, chunk: int = 256):
    """Distance from each query point to ``curve``, metric frozen at the query."""
    m = subdivisions
    u_grid = np.linspace(0.0, curve.n - 1, (curve.n - 1) * m + 1)
    verts = curve(u_grid)
    qa, qb = g.a(queries[:, 0]), g.b(queries[:, 0])

    def dist2(pts, k):
        d = pts - queries[k]
        return qa[k] * d[..., 0] ** 2 + qb[k] * d[..., 1] ** 2

    best_u = np.empty(len(queries))
    for start in range(0, len(queries), chunk):
        k = slice(start, start + chunk)
        d = verts[None, :, :] - queries[k][:, None, :]
        d2 = qa[k][:, None] * d[..., 0] ** 2 + qb[k][:, None] * d[..., 1] ** 2
        best_u[k] = u_grid[np.argmin(d2, axis=1)]

    # golden-section refinement around the best vertex
    all_k = np.arange(len(queries))
    lo = np.clip(best_u - 1.0 / m, 0.0, curve.n - 1)
    hi = np.clip(best_u + 1.0 / m, 0.0, curve.n - 1)
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - gr * (hi - lo)
    x2 = lo + gr * (hi - lo)
    f1, f2 = dist2(curve(x1), all_k), dist2(curve(x2), all_k)
    for _ in range(60):
        left = f1 < f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        x_new = np.where(left, hi - gr * (hi - lo), lo + gr * (hi - lo))
        f_new = dist2(curve(x_new), all_k)
        x1, x2, f1, f2 = (
            np.where(left, x_new, x2),
            np.where(left, x1, x_new),
            np.where(left, f_new, f2),
            np.where(left, f1, f_new),
        )
    u_star = 0.5 * (lo + hi)
    d_refined = dist2(curve(u_star), all_k)
    d_vertex = dist2(curve(best_u), all_k)
    return np.sqrt(np.maximum(np.minimum(d_refined, d_vertex), 0.0))


def unparametrized_deviation(
    t1: GeodesicTrace,
    t2: GeodesicTrace,
    metric: Optional[EquidistantMetric] = None,
    *,
    subdivisions: int = 8,
) -> float:
    """Symmetric max distance between two traces seen as point sets.

    Both traces are assumed to start at the same point in the same direction.
    The longer one is cut to the g-length of the shorter, so only the
    overlapping part is compared. Distances use ``metric`` (default: the
    metric of ``t1``) frozen at each query point.
    """
    g = metric if metric is not None else t1.metric
    if len(t1.t) < 2 or len(t2.t) < 2:
        raise ValueError("traces need at least two samples to overlap")
    c1, c2 = _DenseCurve(t1), _DenseCurve(t2)
    len1, len2 = c1.cumulative_length(g), c2.cumulative_length(g)
    common = min(len1[-1], len2[-1]) * (1.0 - 1e-7)
    if common <= 0:
        raise ValueError("traces have disjoint ranges")
    q1 = t1.y[len1 <= common, :2]
    q2 = t2.y[len2 <= common, :2]
    d12 = _nearest_distance(g, q1, c2, subdivisions)
    d21 = _nearest_distance(g, q2, c1, subdivisions)
    return float(max(d12.max(initial=0.0), d21.max(initial=0.0)))


def length_under(trace: GeodesicTrace, metric: EquidistantMetric) -> float:
    """Length of the traced curve measured in ``metric``."""
    return float(_DenseCurve(trace).cumulative_length(metric)[-1])


def verify_geodesic_equivalence(
    g: EquidistantMetric,
    mp: MappingParams,
    init: GeodesicState,
    t_end: float,
    tol: float = 1e-10,
    *,
    gbar: Optional[EquidistantMetric] = None,
) -> EquivalenceReport:
    """Integrate the same initial point and direction under g and its image.

    The image geodesic is launched at unit gbar-speed and run somewhat past
    the gbar-length of the g-trace; the comparison ignores parameterization.
    """
    adm = admissible_q_range(g)
    if adm.signature(mp.q) != "positive-definite" or mp.p <= 0:
        lo, hi = adm.positive_definite_interval
        raise InadmissibleParameterError(
            f"geodesic comparison needs p > 0 and q in ({lo!r}, {hi!r}), got p={mp.p!r}, q={mp.q!r}",
            interval=adm.positive_definite_interval,
        )
    if gbar is None:
        gbar = map_metric(g, mp)
    tr_g = integrate_geodesic(g, init, t_end, tol)
    speed_bar = math.sqrt(float(gbar.a(init.w)) * init.w_dot**2 + float(gbar.b(init.w)) * init.sigma_dot**2)
    init_bar = GeodesicState(init.w, init.sigma, init.w_dot / speed_bar, init.sigma_dot / speed_bar)
    t_bar = 1.1 * length_under(tr_g, gbar) + 10 * tol
    tr_b = integrate_geodesic(gbar, init_bar, t_bar, tol)

    dev = unparametrized_deviation(tr_g, tr_b, g)
    drift_g, drift_b = tr_g.clairaut_drift(), tr_b.clairaut_drift()
    tols = {"tol": tol, "deviation": 1e3 * tol, "clairaut_drift": 1e2 * tol}
    passed = dev <= tols["deviation"] and drift_g <= tols["clairaut_drift"] and drift_b <= tols["clairaut_drift"]
    return EquivalenceReport(dev, drift_g, drift_b, bool(passed), tols, tr_g.status, tr_b.status)


def random_initial_states(g: EquidistantMetric, n: int, seed: int, margin: float = 0.1) -> list[GeodesicState]:
    """Unit-speed states at uniform interior w, sigma = 0, uniform heading."""
    rng = np.random.default_rng(seed)
    w1, w2 = g.domain
    d = margin * (w2 - w1)
    ws = rng.uniform(w1 + d, w2 - d, n)
    angles = rng.uniform(0.0, 2.0 * math.pi, n)
    return [GeodesicState.from_direction(g, float(w), 0.0, float(th)) for w, th in zip(ws, angles)]
