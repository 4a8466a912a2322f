import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from revmap.ellipsoid import ellipsoid_metric_phi
from revmap.errors import InadmissibleParameterError, SingularityError
from revmap.mapping import (
    MappingParams,
    admissible_q_range,
    check_q,
    christoffel,
    is_nontrivial,
    map_metric,
    psi,
    psi_prime,
    verify_levi_civita,
)


def test_params_validation():
    with pytest.raises(ValueError):
        MappingParams(0.0, 1.0)
    with pytest.raises(ValueError):
        MappingParams(1.0, math.nan)


def test_identity_map(sphere_metric):
    gb = map_metric(sphere_metric, MappingParams())
    w = np.linspace(0.2, 3.0, 11)
    np.testing.assert_array_equal(gb.a(w), sphere_metric.a(w))
    np.testing.assert_array_equal(gb.b(w), sphere_metric.b(w))


def test_homothety(sphere_metric):
    gb = map_metric(sphere_metric, MappingParams(3.0, 0.0))
    w = np.linspace(0.2, 3.0, 11)
    np.testing.assert_allclose(gb.a(w), 3.0, rtol=1e-15)
    np.testing.assert_allclose(gb.b(w), 3 * np.sin(w) ** 2, rtol=1e-15)


def test_sphere_q3_equator(sphere_metric):
    gb = map_metric(sphere_metric, MappingParams(1.0, 3.0))
    assert gb.a(math.pi / 2) == pytest.approx(1 / 16, rel=1e-15)
    assert gb.b(math.pi / 2) == pytest.approx(1 / 4, rel=1e-15)


@pytest.mark.parametrize("p, q", [(1.0, 0.7), (2.5, -0.2), (0.3, 4.0)])
def test_image_derivatives_match_finite_differences(p, q):
    gb = map_metric(ellipsoid_metric_phi(2.0), MappingParams(p, q))
    w, h = np.linspace(0.3, 2.8, 13), 1e-5
    np.testing.assert_allclose(gb.a_prime(w), (gb.a(w + h) - gb.a(w - h)) / (2 * h), atol=1e-8)
    np.testing.assert_allclose(gb.b_prime(w), (gb.b(w + h) - gb.b(w - h)) / (2 * h), atol=1e-8)


def test_psi_examples(sphere_metric, cylinder_metric):
    assert psi(sphere_metric, 0.0, 1.0) == 0.0
    unit_cyl = type(cylinder_metric)(cylinder_metric.a, lambda w: np.ones_like(np.asarray(w, float)),
                                      cylinder_metric.a_prime, cylinder_metric.b_prime, (0.0, 1.0))
    assert psi(unit_cyl, 3.0, 0.5) == pytest.approx(-math.log(2))
    assert psi(sphere_metric, 1.0, math.pi / 2) == pytest.approx(-0.5 * math.log(2))


def test_psi_prime_matches_derivative_of_psi(sphere_metric):
    w, h = np.linspace(0.3, 2.8, 9), 1e-6
    num = (psi(sphere_metric, 2.0, w + h) - psi(sphere_metric, 2.0, w - h)) / (2 * h)
    np.testing.assert_allclose(psi_prime(sphere_metric, 2.0, w), num, atol=1e-9)


def test_psi_singular(sphere_metric):
    with pytest.raises(SingularityError) as exc:
        psi(sphere_metric, -1.0, math.pi / 2)
    assert exc.value.w == pytest.approx(math.pi / 2)


def test_admissible_ranges(sphere_metric, cylinder_metric):
    s = admissible_q_range(sphere_metric)
    assert s.positive_definite_interval[0] == pytest.approx(-1.0, abs=1e-12)
    assert s.positive_definite_interval[1] == math.inf
    assert s.minkowski_interval is None
    c = admissible_q_range(cylinder_metric)
    assert c.positive_definite_interval == (-0.25, math.inf)
    assert c.minkowski_interval == (-math.inf, -0.25)
    assert c.signature(-1.0) == "minkowski"
    assert c.signature(-0.25) == "excluded"


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0, 3.0])
def test_ellipsoid_range(k):
    lo, hi = admissible_q_range(ellipsoid_metric_phi(k)).positive_definite_interval
    assert lo == pytest.approx(-1 / k**2, rel=1e-12)


def test_random_admissible_q_succeed_and_excluded_fail():
    g = ellipsoid_metric_phi(2.0)
    rng = np.random.default_rng(3)
    lo = admissible_q_range(g).positive_definite_interval[0]
    for q in lo + (1 - lo) * rng.random(50):
        gb = map_metric(g, MappingParams(1.0, float(q)))
        assert np.all(gb.a(g.interior_points(20)) > 0)
    for q in (-0.25, -0.5, -3.0):
        with pytest.raises(InadmissibleParameterError) as exc:
            map_metric(g, MappingParams(1.0, q))
        assert 1 + q * float(g.b(exc.value.w)) == pytest.approx(0.0, abs=1e-9)
        assert exc.value.interval[0] == pytest.approx(-0.25)


def test_minkowski_signature(cylinder_metric):
    gb = map_metric(cylinder_metric, MappingParams(1.0, -1.0))
    w = np.linspace(0, 1, 21)
    assert np.all(gb.a(w) * gb.b(w) < 0)
    assert np.all(gb.b(w) == pytest.approx(-4 / 3))


def test_check_q_message(sphere_metric):
    with pytest.raises(InadmissibleParameterError, match=r"positive-definite range is \(-1"):
        check_q(sphere_metric, -2.0)


def test_nontrivial(cylinder_metric):
    g = ellipsoid_metric_phi(2.0)
    assert not is_nontrivial(g, 0.0)
    assert not is_nontrivial(cylinder_metric, 0.7)
    assert is_nontrivial(g, 0.5)


def test_christoffel_examples(sphere_metric, flat_polar_metric):
    c = christoffel(sphere_metric, math.pi / 2)
    assert (c.g_w_ww, c.g_s_ws) == (0.0, pytest.approx(0.0, abs=1e-16))
    assert c.g_w_ss == pytest.approx(0.0, abs=1e-16)
    c = christoffel(sphere_metric, math.pi / 4)
    assert c.g_w_ss == pytest.approx(-0.5)
    assert c.g_s_ws == pytest.approx(1.0)
    c = christoffel(flat_polar_metric, 1.0)
    assert (c.g_w_ss, c.g_s_ws) == (-1.0, 1.0)
    with pytest.raises(SingularityError):
        christoffel(sphere_metric, 0.0)


def test_levi_civita_q0_exact(sphere_metric):
    res = verify_levi_civita(sphere_metric, MappingParams(2.0, 0.0), np.linspace(0.1, 3.0, 20))
    for r in res:
        assert np.all(r == 0.0)


def test_levi_civita_sphere_example(sphere_metric):
    res = verify_levi_civita(sphere_metric, MappingParams(1.0, 3.0), math.pi / 3)
    assert max(abs(float(r)) for r in res) < 1e-12


@pytest.mark.parametrize("name", ["sphere", "k0.5", "k2"])
@given(p=st.floats(0.05, 20.0), u=st.floats(0.0, 1.0), q_hi=st.floats(0.0, 10.0))
@settings(max_examples=25, deadline=None)
def test_levi_civita_random(name, p, u, q_hi, sphere_metric):
    g = {"sphere": sphere_metric, "k0.5": ellipsoid_metric_phi(0.5), "k2": ellipsoid_metric_phi(2.0)}[name]
    lo = admissible_q_range(g).positive_definite_interval[0]
    q = lo + 1e-3 * abs(lo) + u * (q_hi - lo)
    res = verify_levi_civita(g, MappingParams(p, q), g.interior_points(100))
    assert max(float(np.max(np.abs(r))) for r in res) <= 1e-10


def test_levi_civita_against_numerical_christoffels():
    # image Christoffels from finite differences of the image metric only
    g = ellipsoid_metric_phi(2.0)
    q, h = 0.8, 1e-5
    gb = map_metric(g, MappingParams(1.5, q))
    w = np.linspace(0.3, 2.8, 11)
    da = (gb.a(w + h) - gb.a(w - h)) / (2 * h)
    db = (gb.b(w + h) - gb.b(w - h)) / (2 * h)
    c = christoffel(g, w)
    dpsi = psi_prime(g, q, w)
    np.testing.assert_allclose(da / (2 * gb.a(w)) - c.g_w_ww, 2 * dpsi, atol=1e-8)
    np.testing.assert_allclose(db / (2 * gb.b(w)) - c.g_s_ws, dpsi, atol=1e-8)
    np.testing.assert_allclose(-db / (2 * gb.a(w)) - c.g_w_ss, 0.0, atol=1e-8)


def test_one_sided_shift_does_not_hold():
    # with only delta^h_i psi_j, G^s_{w s} would be unchanged; it is not
    g = ellipsoid_metric_phi(2.0)
    w = np.linspace(0.3, 1.3, 5)
    gb = map_metric(g, MappingParams(1.0, 0.8))
    diff = christoffel(gb, w).g_s_ws - christoffel(g, w).g_s_ws
    assert np.all(np.abs(diff) > 1e-2)


@given(q1=st.floats(0.0, 5.0), q2=st.floats(-0.2, 5.0))
@settings(max_examples=30, deadline=None)
def test_q_composition(q1, q2):
    g = ellipsoid_metric_phi(2.0)
    w = g.interior_points(30)
    twice = map_metric(map_metric(g, MappingParams(1.0, q1)), MappingParams(1.0, q2))
    once = map_metric(g, MappingParams(1.0, q1 + q2))
    np.testing.assert_allclose(twice.a(w), once.a(w), rtol=1e-12)
    np.testing.assert_allclose(twice.b(w), once.b(w), rtol=1e-12)


@given(p=st.floats(1e-3, 1e3))
def test_homothety_inverse(p):
    g = ellipsoid_metric_phi(0.5)
    w = g.interior_points(30)
    back = map_metric(map_metric(g, MappingParams(p, 0.0)), MappingParams(1 / p, 0.0))
    np.testing.assert_allclose(back.a(w), g.a(w), rtol=1e-14)
    np.testing.assert_allclose(back.b(w), g.b(w), rtol=1e-14)
