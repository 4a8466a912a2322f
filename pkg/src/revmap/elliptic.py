"""Incomplete elliptic integrals via Carlson's symmetric forms.

    F(phi, kappa) = int_0^phi (1 - kappa^2 sin^2 t)^(-1/2) dt
    E(phi, kappa) = int_0^phi (1 - kappa^2 sin^2 t)^(+1/2) dt

kappa is the modulus (not the parameter m = kappa^2). Duplication is run
until the relative spread falls below the tolerance; the truncated Taylor
tails then leave errors of order ERRTOL^6, well under double precision.
"""

import math

import numpy as np

_RF_ERRTOL = 0.0008
_RD_ERRTOL = 0.0015


def carlson_rf(x: float, y: float, z: float) -> float:
    """R_F(x, y, z); at most one argument may be zero."""
    if min(x, y, z) < 0 or min(x + y, x + z, y + z) == 0:
        raise ValueError(f"R_F needs non-negative arguments, at most one zero: {(x, y, z)}")
    while True:
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * (sy + sz) + sy * sz
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
        ave = (x + y + z) / 3.0
        dx, dy, dz = (ave - x) / ave, (ave - y) / ave, (ave - z) / ave
        if max(abs(dx), abs(dy), abs(dz)) <= _RF_ERRTOL:
            break
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / math.sqrt(ave)


def carlson_rd(x: float, y: float, z: float) -> float:
    """R_D(x, y, z); x, y >= 0 with x + y > 0, z > 0."""
    if min(x, y) < 0 or x + y == 0 or z <= 0:
        raise ValueError(f"R_D argument out of range: {(x, y, z)}")
    c1, c2, c3, c4 = 3.0 / 14.0, 1.0 / 6.0, 9.0 / 22.0, 3.0 / 26.0
    c5, c6 = 0.25 * c3, 1.5 * c4
    total, fac = 0.0, 1.0
    while True:
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * (sy + sz) + sy * sz
        total += fac / (sz * (z + lam))
        fac *= 0.25
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
        ave = 0.2 * (x + y + 3.0 * z)
        dx, dy, dz = (ave - x) / ave, (ave - y) / ave, (ave - z) / ave
        if max(abs(dx), abs(dy), abs(dz)) <= _RD_ERRTOL:
            break
    ea = dx * dy
    eb = dz * dz
    ec = ea - eb
    ed = ea - 6.0 * eb
    ee = ed + ec + ec
    series = 1.0 + ed * (-c1 + c5 * ed - c6 * dz * ee) + dz * (c2 * ee + dz * (-c3 * ec + dz * c4 * ea))
    return 3.0 * total + fac * series / (ave * math.sqrt(ave))


def _check(phi, kappa):
    if not 0.0 <= phi <= 0.5 * math.pi + 1e-15:
        raise ValueError(f"phi must lie in [0, pi/2], got {phi!r}")
    if not 0.0 <= kappa < 1.0:
        raise ValueError(f"modulus kappa must lie in [0, 1), got {kappa!r}")


def _scalar_F(phi, kappa):
    _check(phi, kappa)
    if phi == 0.0 or kappa == 0.0:
        return phi
    s, c = math.sin(phi), math.cos(phi)
    return s * carlson_rf(c * c, 1.0 - (kappa * s) ** 2, 1.0)


def _scalar_E(phi, kappa):
    _check(phi, kappa)
    if phi == 0.0 or kappa == 0.0:
        return phi
    s, c = math.sin(phi), math.cos(phi)
    cc, d = c * c, 1.0 - (kappa * s) ** 2
    k2 = kappa * kappa
    return s * carlson_rf(cc, d, 1.0) - (k2 * s**3 / 3.0) * carlson_rd(cc, d, 1.0)


_vec_F = np.vectorize(_scalar_F, otypes=[float])
_vec_E = np.vectorize(_scalar_E, otypes=[float])


def incomplete_elliptic_F(phi, kappa):
    if np.ndim(phi) == 0 and np.ndim(kappa) == 0:
        return _scalar_F(float(phi), float(kappa))
    return _vec_F(phi, kappa)


def incomplete_elliptic_E(phi, kappa):
    if np.ndim(phi) == 0 and np.ndim(kappa) == 0:
        return _scalar_E(float(phi), float(kappa))
    return _vec_E(phi, kappa)
