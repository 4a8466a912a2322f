"""Rotational ellipsoids and their one-parameter geodesic deformation.

Ellipsoid meridian with polar semi-axis 1 and equatorial semi-axis k:

    r(phi) = k sin(phi),  z(phi) = 1 - cos(phi),  phi in [0, pi].

The deformation with parameter a acts on any simple meridian by

    rbar = r / sqrt(1 + a r^2),
    dzbar/dw = sqrt((1 + a r^2 - r_w^2) / (1 + a r^2)^3),

and after rescaling by sqrt(1 + a k^2) the lower half of the deformed
ellipsoid meridian solves

    dzhat/drhat = rhat / (k sqrt(k^2 - rhat^2)) * sqrt((1 + a k^2 u) / (1 + a u)),
    u = k^2 - rhat^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from revmap.elliptic import incomplete_elliptic_E, incomplete_elliptic_F
from revmap.errors import InadmissibleParameterError, SingularityError, UnsupportedRegimeError
from revmap.geometry import CLOSED_FORM, EquidistantMetric, RevolutionProfile

QUAD_OPTS = {"epsabs": 1e-13, "epsrel": 1e-13, "limit": 200}


@dataclass(frozen=True)
class EllipsoidParams:
    k: float

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("k must be positive")


@dataclass(frozen=True)
class DeformationParams:
    a: float

    def __post_init__(self):
        if not math.isfinite(self.a):
            raise ValueError("deformation parameter a must be finite")


@dataclass(frozen=True)
class MeridianPoint:
    r_hat: float
    z_hat: float


def _check_k(k):
    if not k > 0:
        raise ValueError("k must be positive")


def _check_a(k, a):
    if not 1.0 + a * k * k > 0:
        raise InadmissibleParameterError(f"need 1 + a k^2 > 0, got a={a!r}, k={k!r}")


def ellipsoid_profile(k: float) -> RevolutionProfile:
    """Ellipsoid meridian in the angular parameter phi in [0, pi]."""
    _check_k(k)
    return RevolutionProfile(
        r=lambda p: k * np.sin(p),
        dr=lambda p: k * np.cos(p),
        ddr=lambda p: -k * np.sin(p),
        z=lambda p: 1.0 - np.cos(p),
        dz=np.sin,
        ddz=np.cos,
        domain=(0.0, math.pi),
        kind=CLOSED_FORM,
    )


def ellipsoid_metric_phi(k: float) -> EquidistantMetric:
    """(k^2 cos^2 + sin^2) dphi^2 + k^2 sin^2 dsigma^2."""
    _check_k(k)
    return EquidistantMetric(
        a=lambda p: (k * np.cos(p)) ** 2 + np.sin(p) ** 2,
        b=lambda p: (k * np.sin(p)) ** 2,
        a_prime=lambda p: 2.0 * (1.0 - k * k) * np.sin(p) * np.cos(p),
        b_prime=lambda p: 2.0 * k * k * np.sin(p) * np.cos(p),
        domain=(0.0, math.pi),
        name=f"ellipsoid-phi(k={k!r})",
    )


def deform_profile(p: RevolutionProfile, d: DeformationParams, *, n_check: int = 2049) -> RevolutionProfile:
    """Apply the a-deformation to a simple meridian in its own parameter t.

    With speed v^2 = r_t^2 + z_t^2 the height integrand becomes
    sqrt(z_t^2 + a r^2 v^2) / (1 + a r^2)^(3/2); zbar(t1) = 0 and zbar grows
    monotonically (sign function fixed to +1).
    """
    a = float(d.a)
    w = p.grid(n_check)
    one = 1.0 + a * p.r(w) ** 2
    if np.any(one <= 0):
        w_bad = float(w[np.flatnonzero(one <= 0)[0]])
        raise InadmissibleParameterError(f"1 + a r^2 <= 0 at w={w_bad!r} for a={a!r}", w=w_bad)

    def radicand(t):
        r, rt, zt = p.r(t), p.dr(t), p.dz(t)
        return zt**2 + a * r**2 * (rt**2 + zt**2)

    q = radicand(w)
    scale = np.max(np.abs(q)) + 1.0
    if np.any(q < -1e-13 * scale):
        w_bad = float(w[np.flatnonzero(q < -1e-13 * scale)[0]])
        raise SingularityError(f"negative radicand in the height integrand at w={w_bad!r}", w=w_bad)

    def r_bar(t):
        return p.r(t) / np.sqrt(1.0 + a * p.r(t) ** 2)

    def dr_bar(t):
        return p.dr(t) / (1.0 + a * p.r(t) ** 2) ** 1.5

    def ddr_bar(t):
        r, rt = p.r(t), p.dr(t)
        one = 1.0 + a * r**2
        return p.ddr(t) / one**1.5 - 3.0 * a * r * rt**2 / one**2.5

    def dz_bar(t):
        return np.sqrt(np.maximum(radicand(t), 0.0)) / (1.0 + a * p.r(t) ** 2) ** 1.5

    def ddz_bar(t):
        r, rt, rtt = p.r(t), p.dr(t), p.ddr(t)
        zt, ztt = p.dz(t), p.ddz(t)
        v2 = rt**2 + zt**2
        Q = np.maximum(zt**2 + a * r**2 * v2, 0.0)
        dQ = 2 * zt * ztt + 2 * a * r * rt * v2 + 2 * a * r**2 * (rt * rtt + zt * ztt)
        one = 1.0 + a * r**2
        sq = np.sqrt(Q)
        # at a zero of Q (a pole) use the one-sided limit of d sqrt(Q)
        limit = np.sign(ztt) * np.sqrt(np.maximum(ztt**2 + a * rt**2 * v2, 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            first = np.where(sq > 0, dQ / (2.0 * np.where(sq > 0, sq, 1.0)), limit)
        return first / one**1.5 - 3.0 * a * r * rt * sq / one**2.5

    t1 = p.domain[0]

    def z_bar(t):
        t_arr = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t_arr).ravel()
        order = np.argsort(flat)
        out = np.empty_like(flat)
        acc, prev = 0.0, t1
        for i in order:
            acc += quad(lambda x: float(dz_bar(x)), prev, flat[i], **QUAD_OPTS)[0]
            prev = flat[i]
            out[i] = acc
        return out.reshape(t_arr.shape) if t_arr.ndim else float(out[0])

    return RevolutionProfile(r_bar, dr_bar, ddr_bar, z_bar, dz_bar, ddz_bar, p.domain, p.kind)


def r_bar_max(k: float, a: float) -> float:
    _check_a(k, a)
    return k / math.sqrt(1.0 + a * k * k)


def rescale_hat(r_bar, z_bar, k: float, a: float) -> MeridianPoint:
    """Scale by sqrt(1 + a k^2) so the equatorial radius is k again."""
    _check_a(k, a)
    s = math.sqrt(1.0 + a * k * k)
    r_hat = np.asarray(r_bar) * s
    if np.any(r_hat < -1e-12 * k) or np.any(r_hat > k * (1 + 1e-12)):
        raise ValueError("rescaled radius left [0, k]; (r_bar, k, a) are inconsistent")
    z_hat = np.asarray(z_bar) * s
    if r_hat.ndim == 0:
        return MeridianPoint(float(r_hat), float(z_hat))
    return MeridianPoint(r_hat, z_hat)


def deformed_meridian(k: float, a: float, phi) -> MeridianPoint:
    """Rescaled deformed ellipsoid meridian at parameter values ``phi``."""
    prof = deform_profile(ellipsoid_profile(k), DeformationParams(a))
    return rescale_hat(prof.r(phi), prof.z(phi), k, a)


def _slope_factor(k, a, r_hat):
    u = k * k - r_hat**2
    num, den = 1.0 + a * k * k * u, 1.0 + a * u
    if np.any(den <= 0) or np.any(num < 0):
        raise SingularityError(f"invalid radicand in the meridian slope for k={k!r}, a={a!r}")
    return u, np.sqrt(num / den)


def meridian_slope(k: float, a: float, r_hat):
    """dzhat/drhat of the rescaled deformed meridian (lower half, 0 <= rhat < k)."""
    _check_k(k)
    r_hat = np.asarray(r_hat, dtype=float)
    if np.any(r_hat < 0) or np.any(r_hat > k):
        raise ValueError("r_hat must lie in [0, k)")
    if np.any(r_hat == k):
        raise SingularityError("meridian slope is infinite at the equator r_hat = k", w=k)
    u, fac = _slope_factor(k, a, r_hat)
    out = r_hat / (k * np.sqrt(u)) * fac
    return float(out) if out.ndim == 0 else out


def _z_quad_scalar(k, a, r_hat):
    if not 0.0 <= r_hat <= k * (1 + 1e-14):
        raise ValueError(f"r_hat must lie in [0, k], got {r_hat!r}")
    u_end = math.asin(min(r_hat / k, 1.0))
    # r = k sin(u) removes the square-root singularity at the equator
    _slope_factor(k, a, np.array([0.0, min(r_hat, k)]))

    def integrand(u):
        c2 = math.cos(u) ** 2
        return math.sin(u) * math.sqrt((1.0 + a * k**4 * c2) / (1.0 + a * k * k * c2))

    return quad(integrand, 0.0, u_end, **QUAD_OPTS)[0]


def meridian_z_quadrature(k: float, a: float, r_hat):
    """zhat(rhat) by adaptive quadrature of the slope, zhat(0) = 0."""
    _check_k(k)
    if np.ndim(r_hat) == 0:
        return _z_quad_scalar(k, a, float(r_hat))
    return np.array([_z_quad_scalar(k, a, float(x)) for x in np.ravel(r_hat)]).reshape(np.shape(r_hat))


def _z_closed_scalar(k, a, r):
    if not 0.0 <= r <= k * (1 + 1e-14):
        raise ValueError(f"r must lie in [0, k], got {r!r}")
    r = min(r, k)
    if k == 1.0:
        return 1.0 - math.sqrt(1.0 - r * r)
    if a == 0.0:
        return 1.0 - math.sqrt(k * k - r * r) / k
    u = k * k - r * r
    kappa = math.sqrt(1.0 - k * k)
    phi_r = math.asin(math.sqrt(u / (u + 1.0 / a)))
    phi_0 = math.asin(k / math.sqrt(k * k + 1.0 / a))
    algebraic = (
        -math.sqrt(u) / k * math.sqrt((1.0 + a * k * k * u) / (1.0 + a * u))
        + math.sqrt((1.0 + a * k**4) / (1.0 + a * k * k))
    )
    elliptic = (
        incomplete_elliptic_E(phi_r, kappa) - incomplete_elliptic_E(phi_0, kappa)
        - incomplete_elliptic_F(phi_r, kappa) + incomplete_elliptic_F(phi_0, kappa)
    )
    # integration by parts gives (F - E) with unit coefficient
    return algebraic + elliptic / (math.sqrt(a) * k)


def meridian_z_closed(k: float, a: float, r):
    """Closed form of zhat(r) through incomplete elliptic integrals.

    Supported for 0 < k <= 1 and a >= 0; k = 1 is the unit circle and a = 0
    the undeformed ellipse.
    """
    _check_k(k)
    if k > 1.0:
        raise UnsupportedRegimeError("closed form requires k<1 (use meridian_z_quadrature)")
    if a < 0:
        raise UnsupportedRegimeError("closed form requires a >= 0 (use meridian_z_quadrature)")
    if np.ndim(r) == 0:
        return _z_closed_scalar(k, a, float(r))
    return np.array([_z_closed_scalar(k, a, float(x)) for x in np.ravel(r)]).reshape(np.shape(r))


def small_a_expansion(k: float, r, a: float):
    """Meridian height to first order in a."""
    r = np.asarray(r, dtype=float)
    u = np.maximum(k * k - r * r, 0.0)
    out = 1.0 - np.sqrt(u) / k - a * k * k * (1.0 - k * k) / 6.0 + a * (1.0 - k * k) / (6.0 * k) * u**1.5
    return float(out) if out.ndim == 0 else out


def equator_shift_linear(k: float, a: float) -> float:
    return -a * k * k * (1.0 - k * k) / 6.0


def ellipsoid_r_metric(k: float) -> EquidistantMetric:
    """Ellipsoid metric on the lower half in the radius chart r in (0, k)."""
    _check_k(k)
    c = 1.0 / (k * k) - 1.0
    return EquidistantMetric(
        a=lambda r: (k * k + c * r**2) / (k * k - r**2),
        b=lambda r: r**2,
        # (c D + N) = 1 for N = k^2 + c r^2, D = k^2 - r^2
        a_prime=lambda r: 2.0 * r / (k * k - r**2) ** 2,
        b_prime=lambda r: 2.0 * r,
        domain=(0.0, float(k)),
        name=f"ellipsoid-r(k={k!r})",
    )


def pullback_metric(k: float, a: float) -> EquidistantMetric:
    """Deformed-surface metric pulled back to the ellipsoid's r chart."""
    _check_k(k)
    _check_a(k, a)
    P = 1.0 + a * k * k
    c = 1.0 / (k * k) - 1.0

    def g_rr(r):
        return P * (k * k + c * r**2) / ((k * k - r**2) * (1.0 + a * r**2) ** 2)

    def g_rr_prime(r):
        one = 1.0 + a * r**2
        base = (k * k + c * r**2) / (k * k - r**2)
        return P * (2.0 * r / (k * k - r**2) ** 2 / one**2 - 4.0 * a * r * base / one**3)

    return EquidistantMetric(
        a=g_rr,
        b=lambda r: P * r**2 / (1.0 + a * r**2),
        a_prime=g_rr_prime,
        b_prime=lambda r: 2.0 * P * r / (1.0 + a * r**2) ** 2,
        domain=(0.0, float(k)),
        name=f"pullback(k={k!r},a={a!r})",
    )


def deformed_surface_metric(k: float, a: float) -> EquidistantMetric:
    """Metric of the rescaled deformed surface in its own radius chart rhat."""
    _check_k(k)
    _check_a(k, a)
    alpha = k * k + a * k**4
    beta = 1.0 / (k * k) - a * k * k - 1.0
    P = 1.0 + a * k * k

    def g_rr(r):
        return (alpha + beta * r**2) / ((k * k - r**2) * (P - a * r**2))

    def g_rr_prime(r):
        N, dN = alpha + beta * r**2, 2.0 * beta * r
        D = (k * k - r**2) * (P - a * r**2)
        dD = -2.0 * r * (P - a * r**2) - 2.0 * a * r * (k * k - r**2)
        return (dN * D - N * dD) / D**2

    return EquidistantMetric(
        a=g_rr,
        b=lambda r: r**2,
        a_prime=g_rr_prime,
        b_prime=lambda r: 2.0 * r,
        domain=(0.0, float(k)),
        name=f"deformed-surface(k={k!r},a={a!r})",
    )


def circle_distance(r_hat, z_hat, radius: float):
    """Normal distance to the circle of given radius through the origin pole."""
    return np.abs(np.hypot(r_hat, np.asarray(z_hat) - radius) - radius)


def distance_to_circle(k: float, a: float, n: int = 801) -> float:
    """Max normal distance of the lower deformed meridian to the radius-k circle.

    Sampled at r_hat = k sin(u), u uniform, which clusters near the equator.
    """
    r_hat = k * np.sin(np.linspace(0.0, 0.5 * math.pi, n))
    z_hat = meridian_z_quadrature(k, a, r_hat)
    return float(np.max(circle_distance(r_hat, z_hat, k)))


def deformation_summary(k: float, a: float, n: int = 41) -> dict:
    """Scalar diagnostics of the deformation used by the CLI and sweeps."""
    z_eq = meridian_z_quadrature(k, a, k)
    out = {
        "k": k,
        "a": a,
        "r_bar_max": r_bar_max(k, a),
        "equator_z": z_eq,
        "equator_shift": z_eq - 1.0,
        "equator_shift_linear": equator_shift_linear(k, a),
        "distance_to_circle": distance_to_circle(k, a),
    }
    if k < 1.0 and a >= 0:
        r = np.linspace(0.0, k, n)
        out["closed_vs_quadrature"] = float(np.max(np.abs(meridian_z_closed(k, a, r) - meridian_z_quadrature(k, a, r))))
    else:
        out["closed_vs_quadrature"] = None
    return out
