"""Meridian profiles of surfaces of revolution and their equidistant metrics.

A surface of revolution in E_{n+1} is generated by a meridian (r(w), z(w)),
x^i = r(w) u^i with u on the unit sphere S_{n-1}, and carries the metric

    ds^2 = (r'^2 + z'^2) dw^2 + r^2 dsigma^2,

a special case of the equidistant form a(w) dw^2 + b(w) dsigma^2.

All callables stored on profiles and metrics are numpy-vectorized.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from revmap.errors import DegenerateProfileError, ProfileFormatError

Func = Callable[[np.ndarray], np.ndarray]

CLOSED_FORM = "closed-form"
TABULATED = "tabulated"

# Pole tolerances: interpolant endpoint derivatives lose about one order.
POLE_TOL_CLOSED = 1e-8
POLE_TOL_TABULATED = 1e-4

_GL_X, _GL_W = leggauss(20)


@dataclass(frozen=True, eq=False)
class RevolutionProfile:
    """Meridian curve (r(w), z(w)) on a finite parameter interval.

    ``w`` need not be arc length. First and second derivatives are carried
    explicitly so metrics and their derivatives are exact for closed forms.
    """

    r: Func
    dr: Func
    ddr: Func
    z: Func
    dz: Func
    ddz: Func
    domain: tuple[float, float]
    kind: str = CLOSED_FORM
    samples: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        w1, w2 = self.domain
        if not (math.isfinite(w1) and math.isfinite(w2)):
            raise ValueError("profile domain must be finite")
        if not w1 < w2:
            raise ValueError(f"profile domain must satisfy w1 < w2, got {self.domain}")
        if self.kind not in (CLOSED_FORM, TABULATED):
            raise ValueError(f"unknown profile kind {self.kind!r}")

    def speed(self, w):
        return np.hypot(self.dr(w), self.dz(w))

    def grid(self, n: int, *, interior: bool = False) -> np.ndarray:
        w1, w2 = self.domain
        if interior:
            return np.linspace(w1, w2, n + 2)[1:-1]
        return np.linspace(w1, w2, n)


@dataclass(frozen=True, eq=False)
class EquidistantMetric:
    """ds^2 = a(w) dw^2 + b(w) dsigma^2, dsigma^2 on an (n-1)-dim fiber."""

    a: Func
    b: Func
    a_prime: Func
    b_prime: Func
    domain: tuple[float, float]
    fiber_dim: int = 1
    name: str = ""

    def __post_init__(self):
        if self.fiber_dim < 1:
            raise ValueError("fiber_dim must be >= 1")
        w1, w2 = self.domain
        if not w1 < w2:
            raise ValueError(f"metric domain must satisfy w1 < w2, got {self.domain}")

    def interior_points(self, n: int, margin: float = 0.02) -> np.ndarray:
        """n equispaced points, keeping a relative ``margin`` off each end."""
        w1, w2 = self.domain
        d = (w2 - w1) * margin
        return np.linspace(w1 + d, w2 - d, n)


class TopologyClass(enum.Enum):
    SPHERE = "sphere"
    DISK_OR_PLANE = "disk-or-plane"
    TORUS = "torus"
    CYLINDER = "cylinder"
    OTHER = "other"


@dataclass(frozen=True)
class PoleReport:
    """Smoothness at each end. ``None`` means that end is not a pole."""

    left: Optional[bool]
    right: Optional[bool]
    values: dict

    @property
    def smooth(self) -> bool:
        return all(v is not False for v in (self.left, self.right))


def metric_from_profile(p: RevolutionProfile, fiber_dim: int = 1, *, n_check: int = 513) -> EquidistantMetric:
    """a = r'^2 + z'^2, b = r^2 in whatever parameter the profile uses."""
    w = p.grid(n_check)
    speed2 = p.dr(w) ** 2 + p.dz(w) ** 2
    bad = np.flatnonzero(~(speed2 > 0))
    if bad.size:
        w_bad = float(w[bad[0]])
        raise DegenerateProfileError(f"r'^2 + z'^2 vanishes at w={w_bad!r}", w=w_bad)

    def a(w):
        return p.dr(w) ** 2 + p.dz(w) ** 2

    def a_prime(w):
        return 2.0 * (p.dr(w) * p.ddr(w) + p.dz(w) * p.ddz(w))

    def b(w):
        return p.r(w) ** 2

    def b_prime(w):
        return 2.0 * p.r(w) * p.dr(w)

    return EquidistantMetric(a, b, a_prime, b_prime, p.domain, fiber_dim, name="surface-of-revolution")


def arclength_reparameterize(p: RevolutionProfile, tol: float = 1e-10, *, panels: int = 256) -> RevolutionProfile:
    """Re-express the profile in arc length s in [0, L].

    Cumulative length is tabulated on ``panels`` subintervals with adaptive
    quadrature; s(w) inside a panel uses 20-point Gauss-Legendre, and w(s) is
    recovered by Newton iteration from a linear initial guess.
    """
    w1, w2 = p.domain
    nodes = np.linspace(w1, w2, panels + 1)
    speed = p.speed
    pieces = [
        quad(lambda x: float(speed(x)), lo, hi, epsabs=min(1e-14, tol * 1e-3), epsrel=1e-13, limit=200)[0]
        for lo, hi in zip(nodes[:-1], nodes[1:])
    ]
    s_nodes = np.concatenate([[0.0], np.cumsum(pieces)])
    if not np.all(np.diff(s_nodes) > 0):
        raise RuntimeError("arc length is not strictly increasing")
    length = float(s_nodes[-1])

    def s_of_w(w):
        w = np.atleast_1d(np.asarray(w, dtype=float))
        j = np.clip(np.searchsorted(nodes, w, side="right") - 1, 0, panels - 1)
        lo = nodes[j]
        half = 0.5 * (w - lo)
        x = lo[:, None] + half[:, None] * (_GL_X + 1.0)
        return s_nodes[j] + half * (speed(x) @ _GL_W)

    def w_of_s(s):
        s_arr = np.asarray(s, dtype=float)
        flat = np.atleast_1d(s_arr).ravel()
        w = np.interp(flat, s_nodes, nodes)
        for _ in range(50):
            resid = s_of_w(w) - flat
            w = np.clip(w - resid / speed(w), w1, w2)
            if np.max(np.abs(resid), initial=0.0) <= 1e-3 * tol:
                break
        return w.reshape(s_arr.shape) if s_arr.ndim else w[0]

    def v_and_dv(w):
        dr, dz = p.dr(w), p.dz(w)
        v = np.hypot(dr, dz)
        return dr, dz, v, (dr * p.ddr(w) + dz * p.ddz(w)) / v

    def r(s):
        return p.r(w_of_s(s))

    def z(s):
        return p.z(w_of_s(s))

    def dr(s):
        w = w_of_s(s)
        return p.dr(w) / p.speed(w)

    def dz(s):
        w = w_of_s(s)
        return p.dz(w) / p.speed(w)

    def ddr(s):
        w = w_of_s(s)
        d, _, v, dv = v_and_dv(w)
        return (p.ddr(w) * v - d * dv) / v**3

    def ddz(s):
        w = w_of_s(s)
        _, d, v, dv = v_and_dv(w)
        return (p.ddz(w) * v - d * dv) / v**3

    return RevolutionProfile(r, dr, ddr, z, dz, ddz, (0.0, length), p.kind)


def pole_smoothness_check(p: RevolutionProfile, tol: Optional[float] = None) -> PoleReport:
    """Check |dr/ds| = 1 and dz/ds = 0 at every end where r = 0.

    Derivatives are normalized by the meridian speed, so the check holds
    in any parameterization (arc length included).
    """
    if tol is None:
        tol = POLE_TOL_TABULATED if p.kind == TABULATED else POLE_TOL_CLOSED
    values = {}
    flags = []
    for side, w in zip(("left", "right"), p.domain):
        r = float(p.r(w))
        if abs(r) > tol:
            values[side] = {"w": w, "r": r, "pole": False}
            flags.append(None)
            continue
        v = float(p.speed(w))
        dr_ds = float(p.dr(w)) / v
        dz_ds = float(p.dz(w)) / v
        ok = abs(abs(dr_ds) - 1.0) <= tol and abs(dz_ds) <= tol
        values[side] = {"w": w, "r": r, "pole": True, "dr_ds": dr_ds, "dz_ds": dz_ds}
        flags.append(ok)
    return PoleReport(flags[0], flags[1], values)


def classify_topology(p: RevolutionProfile, tol: Optional[float] = None, *, n_check: int = 257) -> TopologyClass:
    if tol is None:
        tol = POLE_TOL_TABULATED if p.kind == TABULATED else POLE_TOL_CLOSED
    w1, w2 = p.domain
    if np.any(p.r(p.grid(n_check, interior=True)) <= 0):
        return TopologyClass.OTHER
    r1, r2 = float(p.r(w1)), float(p.r(w2))
    zero1, zero2 = abs(r1) <= tol, abs(r2) <= tol
    if zero1 and zero2:
        return TopologyClass.SPHERE
    if zero1 or zero2:
        return TopologyClass.DISK_OR_PLANE
    if r1 < 0 or r2 < 0:
        return TopologyClass.OTHER
    if abs(r1 - r2) <= tol and abs(float(p.z(w1)) - float(p.z(w2))) <= tol:
        return TopologyClass.TORUS
    return TopologyClass.CYLINDER


def b_extrema(g: EquidistantMetric, n: int = 2048, xtol: float = 1e-10) -> tuple[float, float, float, float]:
    """(w_min, b_min, w_max, b_max) by uniform scan plus bounded refinement."""
    w1, w2 = g.domain
    w = np.linspace(w1, w2, n)
    b = np.asarray(g.b(w), dtype=float)

    def refine(i, sign):
        lo, hi = w[max(i - 1, 0)], w[min(i + 1, n - 1)]
        best_w, best_b = w[i], b[i]
        res = minimize_scalar(lambda x: sign * float(g.b(x)), bounds=(lo, hi), method="bounded", options={"xatol": xtol})
        if res.success and res.fun < sign * best_b:
            best_w, best_b = float(res.x), float(sign * res.fun)
        return float(best_w), float(best_b)

    w_min, b_min = refine(int(np.argmin(b)), 1.0)
    w_max, b_max = refine(int(np.argmax(b)), -1.0)
    return w_min, b_min, w_max, b_max


def _read_text(source) -> str:
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data


def load_tabulated_profile(source, format: str = "csv") -> RevolutionProfile:
    """Read a ``w,r,z`` CSV table and interpolate it with cubic splines.

    ``source`` may be a binary or text stream, raw bytes, or a path.
    Row numbers in error messages count data rows from 1.
    """
    if format != "csv":
        raise ProfileFormatError(f"unsupported profile format {format!r}")
    text = _read_text(source)
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ProfileFormatError("no data rows")
    header = [c.strip() for c in lines[0].split(",")]
    if header != ["w", "r", "z"]:
        raise ProfileFormatError(f"bad header {lines[0].strip()!r}; expected 'w,r,z'", row=0)
    rows = []
    for i, rec in enumerate(csv.reader(io.StringIO("\n".join(lines[1:]))), start=1):
        if len(rec) != 3:
            raise ProfileFormatError(f"row {i}: expected 3 fields, got {len(rec)}", row=i)
        try:
            vals = [float(x) for x in rec]
        except ValueError:
            raise ProfileFormatError(f"row {i}: non-numeric value in {rec!r}", row=i) from None
        if not all(math.isfinite(v) for v in vals):
            raise ProfileFormatError(f"row {i}: non-finite value in {rec!r}", row=i)
        rows.append(vals)
    if not rows:
        raise ProfileFormatError("no data rows")
    data = np.array(rows)
    w, r, z = data.T
    steps = np.diff(w)
    if np.any(steps <= 0):
        i = int(np.flatnonzero(steps <= 0)[0]) + 2
        raise ProfileFormatError(f"row {i}: w is not strictly increasing", row=i)
    if len(rows) < 4:
        raise ProfileFormatError(f"need at least 4 data rows, got {len(rows)}")
    if np.any(r[1:-1] < 0):
        i = int(np.flatnonzero(r[1:-1] < 0)[0]) + 2
        raise ProfileFormatError(f"row {i}: negative r in the interior", row=i)

    rs = CubicSpline(w, r)
    zs = CubicSpline(w, z)
    drs, ddrs = rs.derivative(1), rs.derivative(2)
    dzs, ddzs = zs.derivative(1), zs.derivative(2)
    return RevolutionProfile(
        r=rs, dr=drs, ddr=ddrs, z=zs, dz=dzs, ddz=ddzs,
        domain=(float(w[0]), float(w[-1])), kind=TABULATED, samples=data,
    )
