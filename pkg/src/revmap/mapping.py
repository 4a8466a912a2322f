"""The (p, q) family of geodesic mappings between equidistant metrics.

    a dw^2 + b dsigma^2  ->  p a / (1 + q b)^2 dw^2 + p b / (1 + q b) dsigma^2

Both metrics share their unparametrized geodesics, with Christoffel symbols
related through psi = -1/2 ln|1 + q b|:

    Gbar^h_ij = G^h_ij + delta^h_i psi_j + delta^h_j psi_i.

Christoffels are reduced to the (w, sigma) block; every geodesic lies in a
totally geodesic 2-surface spanned by d/dw and a great circle of the fiber.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from revmap.errors import InadmissibleParameterError, SingularityError
from revmap.geometry import EquidistantMetric, b_extrema

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class MappingParams:
    p: float = 1.0
    q: float = 0.0

    def __post_init__(self):
        if self.p == 0 or not math.isfinite(self.p) or not math.isfinite(self.q):
            raise ValueError(f"mapping needs finite p != 0 and finite q, got p={self.p}, q={self.q}")


@dataclass(frozen=True)
class ChristoffelSet:
    """Nonzero Christoffels of a dw^2 + b dsigma^2 at one (or many) w."""

    g_w_ww: np.ndarray
    g_w_ss: np.ndarray
    g_s_ws: np.ndarray


@dataclass(frozen=True)
class QAdmissibility:
    """Admissible q ranges for a metric with b in [b_min, b_max].

    ``excluded`` is the closed interval of q for which 1 + q b(w) = 0 at
    some w; ``minkowski_interval`` is None when b reaches zero.
    """

    positive_definite_interval: tuple[float, float]
    minkowski_interval: Optional[tuple[float, float]]
    excluded: tuple[float, float]
    b_min: float
    b_max: float

    def signature(self, q: float) -> str:
        lo, hi = self.positive_definite_interval
        if lo < q < hi:
            return "positive-definite"
        if self.minkowski_interval is not None and q < self.minkowski_interval[1]:
            return "minkowski"
        return "excluded"

    def is_admissible(self, q: float) -> bool:
        return self.signature(q) != "excluded"


def admissible_q_range(g: EquidistantMetric) -> QAdmissibility:
    _, b_min, _, b_max = b_extrema(g)
    if b_max <= 0:
        raise SingularityError("b(w) must be positive somewhere on the domain")
    pd_lo = -1.0 / b_max
    if b_min > 0:
        mink_hi = -1.0 / b_min
        return QAdmissibility((pd_lo, math.inf), (-math.inf, mink_hi), (mink_hi, pd_lo), b_min, b_max)
    return QAdmissibility((pd_lo, math.inf), None, (-math.inf, pd_lo), max(b_min, 0.0), b_max)


def _crossing_point(g: EquidistantMetric, q: float, n: int = 2048) -> Optional[float]:
    """w where 1 + q b(w) vanishes, or None if it keeps one sign."""
    w = np.linspace(*g.domain, n)
    f = 1.0 + q * np.asarray(g.b(w), dtype=float)
    zero = np.flatnonzero(f == 0)
    if zero.size:
        return float(w[zero[0]])
    flips = np.flatnonzero(np.sign(f[:-1]) != np.sign(f[1:]))
    if flips.size:
        i = flips[0]
        return float(brentq(lambda x: 1.0 + q * float(g.b(x)), w[i], w[i + 1], xtol=1e-14))
    return None


def check_q(g: EquidistantMetric, q: float) -> QAdmissibility:
    """Raise InadmissibleParameterError unless 1 + q b(w) != 0 on the domain."""
    adm = admissible_q_range(g)
    if adm.is_admissible(q):
        return adm
    w_star = _crossing_point(g, q)
    if w_star is None:
        # touches zero at an extremum of b only
        w_min, _, w_max, _ = b_extrema(g)
        w_star = w_max if abs(1 + q * adm.b_max) <= abs(1 + q * adm.b_min) else w_min
    lo, hi = adm.positive_definite_interval
    raise InadmissibleParameterError(
        f"q={q!r} is not admissible: 1 + q b(w) vanishes at w={w_star!r}; "
        f"positive-definite range is ({lo!r}, {hi!r})",
        w=w_star,
        interval=adm.positive_definite_interval,
    )


def map_metric(g: EquidistantMetric, mp: MappingParams) -> EquidistantMetric:
    """Image metric p a/(1+qb)^2 dw^2 + p b/(1+qb) dsigma^2, derivatives exact."""
    p, q = float(mp.p), float(mp.q)
    check_q(g, q)

    def a(w):
        return p * g.a(w) / (1.0 + q * g.b(w)) ** 2

    def b(w):
        bw = g.b(w)
        return p * bw / (1.0 + q * bw)

    def a_prime(w):
        f = 1.0 + q * g.b(w)
        return p * (g.a_prime(w) / f**2 - 2.0 * q * g.a(w) * g.b_prime(w) / f**3)

    def b_prime(w):
        return p * g.b_prime(w) / (1.0 + q * g.b(w)) ** 2

    name = f"{g.name}|p={p!r},q={q!r}" if g.name else f"p={p!r},q={q!r}"
    return EquidistantMetric(a, b, a_prime, b_prime, g.domain, g.fiber_dim, name=name)


def _one_plus_qb(g, q, w):
    f = 1.0 + q * np.asarray(g.b(w), dtype=float)
    bad = np.abs(f) <= 4 * _EPS * np.maximum(1.0, np.abs(f - 1.0))
    if np.any(bad):
        w_bad = _first_bad(w, bad)
        raise SingularityError(f"1 + q b(w) = 0 at w={w_bad!r}", w=w_bad)
    return f


def _first_bad(w, mask) -> float:
    w_arr = np.broadcast_to(np.asarray(w, dtype=float), np.shape(mask)).ravel()
    return float(w_arr[np.flatnonzero(np.ravel(mask))[0]])


def psi(g: EquidistantMetric, q: float, w):
    """-1/2 ln|1 + q b(w)|."""
    return -0.5 * np.log(np.abs(_one_plus_qb(g, q, w)))


def psi_prime(g: EquidistantMetric, q: float, w):
    return -0.5 * q * g.b_prime(w) / _one_plus_qb(g, q, w)


def is_nontrivial(g: EquidistantMetric, q: float, samples: int = 256) -> bool:
    """True when q b'(w) is not identically zero (the mapping is not affine)."""
    if samples < 2:
        raise ValueError("samples must be >= 2")
    if q == 0:
        return False
    w = np.linspace(*g.domain, samples)
    db = np.abs(np.asarray(g.b_prime(w), dtype=float))
    scale = max(1.0, float(np.max(np.abs(g.b(w))))) / (g.domain[1] - g.domain[0])
    return bool(np.max(db) > 1e3 * _EPS * scale)


def christoffel(g: EquidistantMetric, w) -> ChristoffelSet:
    """G^w_ww = a'/2a, G^w_ss = -b'/2a, G^s_ws = b'/2b."""
    a, b = np.asarray(g.a(w), dtype=float), np.asarray(g.b(w), dtype=float)
    bad = (b <= 0) | (a == 0)
    if np.any(bad):
        w_bad = _first_bad(w, bad)
        raise SingularityError(f"Christoffel symbols undefined at w={w_bad!r} (a=0 or b<=0)", w=w_bad)
    da, db = g.a_prime(w), g.b_prime(w)
    return ChristoffelSet(da / (2 * a), -db / (2 * a), db / (2 * b))


def verify_levi_civita(g: EquidistantMetric, mp: MappingParams, w, gbar: Optional[EquidistantMetric] = None):
    """Residuals of the Levi-Civita equation for the (p, q) image of g.

    Returns (dG^w_ww - 2 psi', dG^s_ws - psi', dG^w_ss); all vanish
    identically for this family.
    """
    if gbar is None:
        gbar = map_metric(g, mp)
    c = christoffel(g, w)
    cb = christoffel(gbar, w)
    dpsi = psi_prime(g, mp.q, w)
    return (
        cb.g_w_ww - c.g_w_ww - 2.0 * dpsi,
        cb.g_s_ws - c.g_s_ws - dpsi,
        cb.g_w_ss - c.g_w_ss,
    )
