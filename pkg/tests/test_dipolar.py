import math
from itertools import product

import numpy as np
import pytest
from scipy import integrate

from nanonmr.dipolar import (
    MAGIC_ANGLE,
    ZETA,
    ZETA_TILDE,
    IntegralMethod,
    IntegralSpec,
    PhysicalConstants,
    SampleGeometry,
    b_rms_sq,
    b_rms_sq_from_integrals,
    b_rms_undriven,
    b_rms_undriven_alt,
    coupling_g,
    coupling_g_harmonic,
    dd_matrix_direct,
    dd_matrix_from_terms,
    dd_terms,
    dipolar_integral,
    f2,
    field_moments,
    mean_field,
    mean_field_from_integrals,
    supported_indices,
    third_moment_from_integrals,
    third_moment_szix,
    wigner_d2,
    y2,
)
from nanonmr.errors import BadIndex, CutoffRequired

J = 0.49


def _lab_to_nv(alpha):
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])


def _angles(v):
    r = np.linalg.norm(v)
    return math.acos(v[2] / r), math.atan2(v[1], v[0])


# ------------------------------------------------------------- harmonics

def test_y2_examples():
    assert y2(0, 0.0, 1.3) == pytest.approx(0.5 * math.sqrt(5 / math.pi), rel=1e-15)
    assert abs(y2(1, math.pi / 2, 0.0)) < 1e-16
    with pytest.raises(BadIndex):
        y2(3, 0.1, 0.1)


def test_y2_orthonormal():
    x, w = np.polynomial.legendre.leggauss(40)
    phi = 2 * math.pi * np.arange(64) / 64
    tt, pp = np.meshgrid(np.arccos(x), phi, indexing="ij")
    wt = w[:, None] * (2 * math.pi / 64)
    for m, k in product(range(-2, 3), repeat=2):
        val = np.sum(y2(m, tt, pp) * np.conj(y2(k, tt, pp)) * wt)
        assert abs(val - (m == k)) < 1e-10


def test_zeta_symmetries():
    for m in (1, 2):
        assert ZETA[-m] == ZETA[m]
        assert ZETA_TILDE[-m] == pytest.approx((-1) ** m * ZETA_TILDE[m], rel=1e-15)


def test_dd_terms_axial():
    t = dd_terms(0.0, 0.7, 2.0)
    assert all(abs(x) < 1e-16 for x in (t.C, t.D, t.E, t.F))
    assert t.A == pytest.approx(-2.0 / 8.0, rel=1e-14)


def test_dd_terms_reassemble_dipole_matrix():
    rng = np.random.default_rng(2)
    for _ in range(50):
        th, ph, r = rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi), rng.uniform(0.5, 3)
        diff = dd_matrix_from_terms(dd_terms(th, ph, r)) - dd_matrix_direct(th, ph, r)
        assert np.max(np.abs(diff)) < 1e-12


def test_coupling_examples():
    assert coupling_g(1.0, math.pi / 4, 0.0) == pytest.approx(-0.735, rel=1e-14)
    assert coupling_g(1.0, math.pi / 2, 0.3) == pytest.approx(0.0, abs=1e-15)
    rng = np.random.default_rng(9)
    r, th, ph = rng.uniform(0.5, 5, 100), rng.uniform(0, math.pi, 100), rng.uniform(0, 6.3, 100)
    assert np.max(np.abs(coupling_g(r, th, ph) - coupling_g_harmonic(r, th, ph))) < 1e-12


# ------------------------------------------------------------- Wigner d

def test_wigner_identity_and_legendre():
    assert np.allclose(wigner_d2(0.0), np.eye(5), atol=1e-15)
    assert wigner_d2(math.pi / 3)[2, 2] == pytest.approx(-0.125, rel=1e-14)
    for a in (0.3, 1.1, 2.5):
        assert wigner_d2(a)[2, 2] == pytest.approx((3 * math.cos(a) ** 2 - 1) / 2, rel=1e-13)


def test_wigner_orthogonal():
    for a in np.linspace(-3, 3, 13):
        d = wigner_d2(a)
        assert np.max(np.abs(d.T @ d - np.eye(5))) < 1e-12


def test_wigner_rotates_harmonics():
    rng = np.random.default_rng(10)
    for _ in range(100):
        alpha = rng.uniform(-math.pi, math.pi)
        v = rng.normal(size=3)
        th_lab, ph_lab = _angles(v)
        th_nv, ph_nv = _angles(_lab_to_nv(alpha) @ v)
        d = wigner_d2(alpha)
        lab = np.array([y2(k, th_lab, ph_lab) for k in range(-2, 3)])
        for m in range(-2, 3):
            assert abs(d[m + 2] @ lab - y2(m, th_nv, ph_nv)) < 1e-10


# ------------------------------------------------------------- integrals

def _geom(alpha=0.0, depth=1.0):
    return SampleGeometry(depth=depth, alpha=alpha)


def test_golden_integrals():
    g = _geom()
    assert dipolar_integral(IntegralSpec(1, (0,), g)).real == pytest.approx(-4 * math.pi / 3, rel=1e-13)
    for d in (1.0, 2.5):
        g = _geom(depth=d)
        for ms, ref in [((0, 0), math.pi / 4), ((1, -1), math.pi / 16), ((-1, 1), math.pi / 16),
                        ((2, -2), math.pi / 64), ((-2, 2), math.pi / 64)]:
            assert dipolar_integral(IntegralSpec(2, ms, g)).real == pytest.approx(ref / d**3, rel=1e-13)
        for ms, ref in [((0, 0, 0), -160 * math.pi / 1001), ((2, -2, 0), -4 * math.pi / 3003),
                        ((1, 1, -2), -math.pi / 286), ((1, -1, 0), -7 * math.pi / 429)]:
            assert dipolar_integral(IntegralSpec(3, ms, g)).real == pytest.approx(ref / d**6, rel=1e-13)


@pytest.mark.parametrize("alpha", [0.0, 0.3, MAGIC_ANGLE, 1.2])
@pytest.mark.parametrize("order", [1, 2, 3])
def test_quadrature_matches_analytic(alpha, order):
    g = _geom(alpha, 1.7)
    cutoff = 1e6 * 1.7 if order == 1 else None
    for ms in supported_indices(order):
        spec = IntegralSpec(order, ms, g, cutoff)
        a = dipolar_integral(spec, IntegralMethod.ANALYTIC)
        q = dipolar_integral(spec, IntegralMethod.QUADRATURE)
        assert abs(q - a) <= 1e-4 * abs(a) + 1e-12 * 1.7 ** (-3 * (order - 1))


def test_order_one_needs_cutoff_for_quadrature():
    with pytest.raises(CutoffRequired):
        dipolar_integral(IntegralSpec(1, (1,), _geom(0.4)), IntegralMethod.QUADRATURE)
    with pytest.raises(BadIndex):
        IntegralSpec(2, (1,), _geom())
    with pytest.raises(BadIndex):
        IntegralSpec(4, (1, 1, 1, 1), _geom())


def test_order_one_cutoff_independent():
    g = _geom(0.7)
    for m in range(-2, 3):
        a = dipolar_integral(IntegralSpec(1, (m,), g, 1e3), IntegralMethod.QUADRATURE)
        b = dipolar_integral(IntegralSpec(1, (m,), g, 2e3), IntegralMethod.QUADRATURE)
        assert abs(a - b) <= 1e-6 * max(abs(a), 1e-9)


def test_hermiticity_under_quadrature():
    g = _geom(0.9)
    for m1, m2 in product(range(-2, 3), repeat=2):
        a = dipolar_integral(IntegralSpec(2, (m1, m2), g), IntegralMethod.QUADRATURE)
        b = dipolar_integral(IntegralSpec(2, (-m1, -m2), g), IntegralMethod.QUADRATURE)
        assert abs(a - np.conj(b)) < 1e-12


# ---------------------------------------------------------- field moments

def test_mean_field():
    assert mean_field(_geom(0.0)) == 0.0
    water = SampleGeometry(depth=7.0, alpha=MAGIC_ANGLE, density=33)
    assert mean_field(water) == pytest.approx(-47.915289599916242, rel=1e-13)
    assert abs(abs(mean_field(water)) - 48) < 1
    for a in (0.2, MAGIC_ANGLE, 1.3):
        g = SampleGeometry(depth=3.0, alpha=a, density=33)
        assert mean_field_from_integrals(g) == pytest.approx(mean_field(g), rel=1e-4)


def test_b_rms_formula_and_scaling():
    assert f2(0.0) == pytest.approx(math.pi / 8, rel=1e-15)
    g1 = SampleGeometry(depth=1.0, alpha=MAGIC_ANGLE, density=33)
    assert b_rms_sq(g1) == pytest.approx(3.6305065138263151, rel=1e-13)
    g2 = SampleGeometry(depth=2.0, alpha=MAGIC_ANGLE, density=33)
    assert b_rms_sq(g2) == pytest.approx(b_rms_sq(g1) / 8, rel=1e-15)
    g10 = SampleGeometry(depth=10.0, alpha=MAGIC_ANGLE, density=33)
    assert math.sqrt(b_rms_sq(g10)) * 1e3 == pytest.approx(60.2537, abs=1e-3)


def _b_rms_sq_direct(alpha, depth, density=33.0):
    """n int_{z > 0} g^2 d^3r done in lab coordinates with the radial integral in closed form."""
    rot = _lab_to_nv(alpha)

    def ang(phi, u):
        s = math.sqrt(1 - u * u)
        v = rot @ np.array([s * math.cos(phi), s * math.sin(phi), u])
        th, ph = _angles(v)
        return coupling_g(1.0, th, ph) ** 2 * (u / depth) ** 3 / 3

    val, _ = integrate.dblquad(ang, 0, 1, 0, 2 * math.pi, epsabs=1e-13, epsrel=1e-11)
    return density * val


@pytest.mark.parametrize("alpha", [0.0, 0.4, MAGIC_ANGLE, 1.3])
def test_b_rms_against_direct_lab_integration(alpha):
    g = SampleGeometry(depth=1.3, alpha=alpha, density=33)
    ref = _b_rms_sq_direct(alpha, 1.3)
    assert b_rms_sq(g) == pytest.approx(ref, rel=1e-8)
    assert b_rms_sq_from_integrals(g) == pytest.approx(ref, rel=1e-8)


def test_undriven_split():
    g0 = SampleGeometry(depth=2.0, alpha=0.0, density=33)
    udq, udc = b_rms_undriven(g0)
    assert udq == pytest.approx(0.0, abs=1e-14)
    assert udc == pytest.approx(33 * J**2 / (4 * math.pi * 8), rel=1e-12)
    # the alternative closed forms agree at alpha = 0 only
    pq, pc = b_rms_undriven_alt(g0)
    assert pq == pytest.approx(0.0, abs=1e-14) and pc == pytest.approx(udc, rel=1e-12)
    g = SampleGeometry(depth=2.0, alpha=MAGIC_ANGLE, density=33)
    assert abs(b_rms_undriven_alt(g)[1] / b_rms_undriven(g)[1] - 1) > 1e-3
    # analytic and quadrature agree
    q = b_rms_undriven(g, method=IntegralMethod.QUADRATURE)
    assert q == pytest.approx(b_rms_undriven(g), rel=1e-9)


def test_third_moment():
    assert third_moment_szix(_geom(0.0)) == 0.0
    for a in (0.3, MAGIC_ANGLE, 1.2):
        g = SampleGeometry(depth=1.0, alpha=a, density=33)
        closed = third_moment_szix(g)
        assert third_moment_from_integrals(g) == pytest.approx(closed, rel=1e-3)
        assert third_moment_from_integrals(g, method=IntegralMethod.ANALYTIC) == pytest.approx(closed, rel=1e-12)
        assert third_moment_szix(SampleGeometry(1.0, -a, 33)) == pytest.approx(-closed, rel=1e-14)
    g = SampleGeometry(depth=2.0, alpha=0.5, density=33)
    assert third_moment_szix(g) == pytest.approx(third_moment_szix(SampleGeometry(1.0, 0.5, 33)) / 64, rel=1e-14)


def test_moments_linear_in_density():
    a = SampleGeometry(depth=4.0, alpha=0.8, density=10)
    b = SampleGeometry(depth=4.0, alpha=0.8, density=30)
    fa, fb = field_moments(a), field_moments(b)
    for x, y in [(fa.mean_field, fb.mean_field), (fa.b_rms_sq, fb.b_rms_sq),
                 (fa.udq_sq, fb.udq_sq), (fa.udc_sq, fb.udc_sq), (fa.third_moment, fb.third_moment)]:
        assert y == pytest.approx(3 * x, rel=1e-13)


def test_constants_scale():
    g = SampleGeometry(depth=4.0, alpha=0.8)
    assert b_rms_sq(g, PhysicalConstants(0.98)) == pytest.approx(4 * b_rms_sq(g), rel=1e-14)
    with pytest.raises(ValueError):
        PhysicalConstants(0.0)
    with pytest.raises(ValueError):
        SampleGeometry(depth=-1.0)
