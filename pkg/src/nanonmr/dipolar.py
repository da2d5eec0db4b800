"""Dipolar geometry of an NV sensor below a planar sample.

Conventions
-----------
Lengths are in nm, times in microseconds, frequencies in rad/us. The dipolar
constant ``J`` (MHz nm^3) is used directly as an angular-frequency coefficient,
so every field appears as a coupling frequency gamma_e * B.

The lab frame has z along the surface normal, pointing from the sensor into
the sample; the sample fills z > d. The NV axis is tilted from the normal by
``alpha`` about the y axis. Directions in the NV frame map to the lab frame by
the rotation R_y(-alpha), which gives

    Y2^m(NV frame) = sum_m' d2[m, m'](alpha) * Y2^m'(lab frame).

With this orientation the mean field is -pi n J sin(2 alpha).

Integrals
---------
``I_k^{(m_1..m_k)} = prod(zeta_tilde[m_i]) * int d^3r r^{-3k} prod Y2^{m_i}(NV frame)``
over the half-space. Order 1 diverges logarithmically and is regularised by a
radial cutoff; the cutoff drops out because Y2^0 integrates to zero over the
hemisphere.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import NamedTuple, Sequence

import numpy as np

from .errors import BadIndex, CutoffRequired, NoClosedForm

__all__ = [
    "PhysicalConstants",
    "SampleGeometry",
    "WATER_DENSITY",
    "MAGIC_ANGLE",
    "ZETA",
    "ZETA_TILDE",
    "DipoleCoefficients",
    "FieldMoments",
    "IntegralSpec",
    "IntegralMethod",
    "y2",
    "DDTerms",
    "dd_terms",
    "dd_matrix_from_terms",
    "dd_matrix_direct",
    "wigner_d2",
    "coupling_g",
    "coupling_g_harmonic",
    "dipolar_integral",
    "supported_indices",
    "mean_field",
    "mean_field_from_integrals",
    "f2",
    "b_rms_sq",
    "b_rms_sq_from_integrals",
    "b_rms_undriven",
    "b_rms_undriven_alt",
    "third_moment_szix",
    "third_moment_from_integrals",
    "field_moments",
]

WATER_DENSITY = 33.0  # proton density of water, nm^-3
MAGIC_ANGLE = math.radians(54.7)


@dataclass(frozen=True)
class PhysicalConstants:
    J: float = 0.49

    def __post_init__(self):
        if not self.J > 0:
            raise ValueError("J must be positive")


@dataclass(frozen=True)
class SampleGeometry:
    """Sensor depth, NV tilt, nuclear density, diffusion and optional volume."""

    depth: float
    alpha: float = 0.0
    density: float = WATER_DENSITY
    diffusion: float = 0.0
    volume: float | None = None

    def __post_init__(self):
        if not self.depth > 0:
            raise ValueError("depth must be positive")
        if not self.density > 0:
            raise ValueError("density must be positive")
        if self.diffusion < 0:
            raise ValueError("diffusion must be non-negative")
        if self.volume is not None and not self.volume > 0:
            raise ValueError("volume must be positive when given")

    @property
    def tau_d(self) -> float:
        """Diffusion time across the depth, d^2 / D (inf when D = 0)."""
        return self.depth**2 / self.diffusion if self.diffusion > 0 else math.inf

    @property
    def tau_v(self) -> float | None:
        """Diffusion time across the sample, V^(2/3) / D."""
        if self.volume is None:
            return None
        return self.volume ** (2.0 / 3.0) / self.diffusion if self.diffusion > 0 else math.inf

    @property
    def n_nuclei(self) -> float | None:
        return None if self.volume is None else self.density * self.volume


ZETA = {0: -1.0, 1: 1.5, -1: 1.5, 2: -0.75, -2: -0.75}
ZETA_TILDE = {
    0: -4.0 * math.sqrt(math.pi / 5.0),
    1: 3.0 * math.sqrt(2.0 * math.pi / 15.0),
    -1: -3.0 * math.sqrt(2.0 * math.pi / 15.0),
    2: -3.0 * math.sqrt(2.0 * math.pi / 15.0),
    -2: -3.0 * math.sqrt(2.0 * math.pi / 15.0),
}


@dataclass(frozen=True)
class DipoleCoefficients:
    zeta: dict = field(default_factory=lambda: dict(ZETA))
    zeta_tilde: dict = field(default_factory=lambda: dict(ZETA_TILDE))


@dataclass(frozen=True)
class FieldMoments:
    mean_field: float
    b_rms_sq: float
    f2: float
    udq_sq: float
    udc_sq: float
    third_moment: float


def _check_m(m: int) -> int:
    if int(m) != m or abs(m) > 2:
        raise BadIndex(f"m={m} outside [-2, 2]")
    return int(m)


_Y0 = 0.25 * math.sqrt(5.0 / math.pi)
_Y1 = 0.5 * math.sqrt(15.0 / (2.0 * math.pi))
_Y2 = 0.25 * math.sqrt(15.0 / (2.0 * math.pi))


def y2(m: int, theta, phi):
    """Rank-2 spherical harmonic Y_2^m(theta, phi) (Condon-Shortley phase)."""
    m = _check_m(m)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    ct, st = np.cos(theta), np.sin(theta)
    if m == 0:
        out = _Y0 * (3.0 * ct**2 - 1.0) + 0j * phi
    elif abs(m) == 1:
        out = -np.sign(m) * _Y1 * np.exp(1j * m * phi) * ct * st
    else:
        out = _Y2 * np.exp(1j * m * phi) * st**2
    return out[()] if out.ndim == 0 else out


class DDTerms(NamedTuple):
    """Coefficients of the six spin-operator sectors of H_DD / J.

    A: Sz Iz, B: (S+ I- + S- I+), C: (Sz I+ + Iz S+), D: (Sz I- + Iz S-),
    E: S+ I+, F: S- I-.
    """

    A: complex
    B: complex
    C: complex
    D: complex
    E: complex
    F: complex


def dd_terms(theta: float, phi: float, r: float) -> DDTerms:
    if not r > 0:
        raise ValueError("r must be positive")
    inv = r**-3
    k1 = 2.0 * math.sqrt(2.0 * math.pi / 15.0)
    return DDTerms(
        A=-4.0 * math.sqrt(math.pi / 5.0) * inv * y2(0, theta, phi),
        # + sign: reproduces the direct dipole matrix
        B=math.sqrt(math.pi / 5.0) * inv * y2(0, theta, phi),
        C=-1.5 * k1 * inv * y2(-1, theta, phi),
        D=1.5 * k1 * inv * y2(1, theta, phi),
        E=-0.75 * 2.0 * k1 * inv * y2(-2, theta, phi),
        F=-0.75 * 2.0 * k1 * inv * y2(2, theta, phi),
    )


_SPIN = {
    "x": np.array([[0, 0.5], [0.5, 0]], dtype=complex),
    "y": np.array([[0, -0.5j], [0.5j, 0]], dtype=complex),
    "z": np.array([[0.5, 0], [0, -0.5]], dtype=complex),
    "+": np.array([[0, 1], [0, 0]], dtype=complex),
    "-": np.array([[0, 0], [1, 0]], dtype=complex),
}


def _two(a: str, b: str) -> np.ndarray:
    return np.kron(_SPIN[a], _SPIN[b])


def dd_matrix_from_terms(terms: DDTerms) -> np.ndarray:
    """4x4 matrix (sensor x nucleus) of the operator-weighted sector sum."""
    eye = np.eye(2)
    return (terms.A * _two("z", "z")
            + terms.B * (_two("+", "-") + _two("-", "+"))
            + terms.C * (_two("z", "+") + np.kron(_SPIN["+"], eye) @ np.kron(eye, _SPIN["z"]))
            + terms.D * (_two("z", "-") + np.kron(_SPIN["-"], eye) @ np.kron(eye, _SPIN["z"]))
            + terms.E * _two("+", "+")
            + terms.F * _two("-", "-"))


def dd_matrix_direct(theta: float, phi: float, r: float) -> np.ndarray:
    """-r^-3 (3 (S.n)(I.n) - S.I) for spin-1/2 operators."""
    n = (math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta))
    s_n = sum(c * np.kron(_SPIN[a], np.eye(2)) for c, a in zip(n, "xyz"))
    i_n = sum(c * np.kron(np.eye(2), _SPIN[a]) for c, a in zip(n, "xyz"))
    s_dot_i = sum(_two(a, a) for a in "xyz")
    return -(3.0 * s_n @ i_n - s_dot_i) / r**3


def _little_d(j: int, m: int, mp: int, beta: float) -> float:
    """Wigner small-d element d^j_{m mp}(beta)."""
    f = math.factorial
    pre = math.sqrt(f(j + m) * f(j - m) * f(j + mp) * f(j - mp))
    c, s = math.cos(beta / 2.0), math.sin(beta / 2.0)
    total = 0.0
    for k in range(max(0, mp - m), min(j + mp, j - m) + 1):
        den = f(j + mp - k) * f(k) * f(j - m - k) * f(k + m - mp)
        total += ((-1) ** (k + m - mp) / den
                  * c ** (2 * j + mp - m - 2 * k) * s ** (2 * k + m - mp))
    return pre * total


def wigner_d2(alpha: float) -> np.ndarray:
    """Rank-2 little-d matrix, rows/columns ordered m = -2..2."""
    return np.array([[_little_d(2, m, mp, alpha) for mp in range(-2, 3)]
                     for m in range(-2, 3)])


def coupling_g(r, theta, phi, constants: PhysicalConstants = PhysicalConstants()):
    """S_z I_x coupling of a nucleus at NV-frame position (r, theta, phi), rad/us."""
    r, theta, phi = (np.asarray(v, dtype=float) for v in (r, theta, phi))
    out = -3.0 * constants.J * r**-3 * np.sin(theta) * np.cos(theta) * np.cos(phi)
    return out[()] if out.ndim == 0 else out


def coupling_g_harmonic(r, theta, phi, constants: PhysicalConstants = PhysicalConstants()):
    """The same coupling assembled from zeta_tilde and Y2^{+-1}."""
    val = constants.J * np.asarray(r, dtype=float) ** -3 * (
        ZETA_TILDE[1] * y2(1, theta, phi) + ZETA_TILDE[-1] * y2(-1, theta, phi))
    return np.real(val)


# ----------------------------------------------------------------- integrals

class IntegralMethod(enum.Enum):
    ANALYTIC = "analytic"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class IntegralSpec:
    order: int
    m_indices: tuple
    geometry: SampleGeometry
    radial_cutoff: float | None = None
    quadrature_order: int = 64
    phi_points: int = 128

    def __post_init__(self):
        if self.order not in (1, 2, 3):
            raise BadIndex(f"order {self.order} not in (1, 2, 3)")
        ms = tuple(int(m) for m in self.m_indices)
        if len(ms) != self.order:
            raise BadIndex(f"order {self.order} needs {self.order} indices, got {ms}")
        for m in ms:
            _check_m(m)
        object.__setattr__(self, "m_indices", ms)
        if self.radial_cutoff is not None and not self.radial_cutoff > self.geometry.depth:
            raise ValueError("radial cutoff must exceed the depth")


# Y2^m(u, phi) = _NORM[m] * e^{i m phi} * poly_m(u) * sqrt(1-u^2)^{|m|}
_NORM = {0: Fraction(1), 1: Fraction(-1), -1: Fraction(1), 2: Fraction(1), -2: Fraction(1)}
_NORM_F = {0: _Y0, 1: _Y1, -1: _Y1, 2: _Y2, -2: _Y2}
_POLY = {0: (-1, 0, 3), 1: (0, 1), -1: (0, 1), 2: (1,), -2: (1,)}


def _polymul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@lru_cache(maxsize=None)
def _untilted_poly(ms: tuple) -> tuple:
    """Exact u-polynomial (rational coefficients) of prod Y2^{m'} without norms, sum m' = 0."""
    poly = [Fraction(1)]
    for m in ms:
        poly = _polymul(poly, [Fraction(c) for c in _POLY[m]])
    half = sum(abs(m) for m in ms) // 2
    for _ in range(half):
        poly = _polymul(poly, [Fraction(1), Fraction(0), Fraction(-1)])
    sign = Fraction(1)
    for m in ms:
        sign *= _NORM[m]
    return tuple(sign * c for c in poly)


def _untilted_kernel_analytic(ms: tuple, order: int) -> float:
    """2 pi int_0^1 du prod Y2^{m'} * radial(u) at d = 1 (radial part already done)."""
    if sum(ms) != 0:
        return 0.0
    poly = _untilted_poly(ms)
    if order == 1:
        # radial: ln(R u / d); the ln(R/d) part multiplies int poly du = 0
        val = sum(-c / Fraction((k + 1) ** 2) for k, c in enumerate(poly))
        if sum(c / Fraction(k + 1) for k, c in enumerate(poly)) != 0:
            raise NoClosedForm(f"cutoff-dependent index set {ms}")
    elif order == 2:
        val = sum(c / Fraction(3 * (k + 4)) for k, c in enumerate(poly))
    else:
        val = sum(c / Fraction(6 * (k + 7)) for k, c in enumerate(poly))
    norm = 1.0
    for m in ms:
        norm *= _NORM_F[m]
    return 2.0 * math.pi * norm * float(val)


def _quadrature_nodes(order: int, n_u: int, n_phi: int):
    x, w = np.polynomial.legendre.leggauss(n_u)
    v = 0.5 * (x + 1.0)
    wv = 0.5 * w
    if order == 1:
        # u = v^3 tames the logarithmic endpoint singularity
        u, wu = v**3, 3.0 * v**2 * wv
    else:
        u, wu = v, wv
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    wphi = np.full(n_phi, 2.0 * math.pi / n_phi)
    return u, wu, phi, wphi


def _radial(order: int, u: np.ndarray, depth: float, cutoff: float | None) -> np.ndarray:
    if order == 1:
        return np.log(cutoff * u / depth)
    if order == 2:
        return (u / depth) ** 3 / 3.0
    return (u / depth) ** 6 / 6.0


def _untilted_kernels_quadrature(spec: IntegralSpec) -> np.ndarray:
    """All untilted kernels K[m'_1+2, ..., m'_k+2] by Gauss-Legendre x trapezoid."""
    order = spec.order
    u, wu, phi, wphi = _quadrature_nodes(order, spec.quadrature_order, spec.phi_points)
    theta = np.arccos(u)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    ys = np.stack([y2(m, tt, pp) for m in range(-2, 3)])
    weight = (wu * _radial(order, u, spec.geometry.depth, spec.radial_cutoff))[:, None] * wphi[None, :]
    if order == 1:
        return np.einsum("aij,ij->a", ys, weight)
    if order == 2:
        return np.einsum("aij,bij,ij->ab", ys, ys, weight)
    return np.einsum("aij,bij,cij,ij->abc", ys, ys, ys, weight)


def _untilted_kernels_analytic(order: int, depth: float) -> np.ndarray:
    k = np.zeros((5,) * order)
    for ms in product(range(-2, 3), repeat=order):
        k[tuple(m + 2 for m in ms)] = _untilted_kernel_analytic(ms, order)
    return k * depth ** (-3 * (order - 1))


def supported_indices(order: int):
    """Index sets with a closed form: every set for orders 2 and 3, and every m for order 1."""
    return list(product(range(-2, 3), repeat=order))


def dipolar_integral(spec: IntegralSpec, method: IntegralMethod | str = IntegralMethod.ANALYTIC) -> complex:
    """Half-space dipolar integral of the given order and NV-frame indices."""
    method = IntegralMethod(method)
    order = spec.order
    if method is IntegralMethod.ANALYTIC:
        kern = _untilted_kernels_analytic(order, spec.geometry.depth)
    else:
        if order == 1 and spec.radial_cutoff is None:
            raise CutoffRequired("order-1 quadrature needs a radial cutoff")
        kern = _untilted_kernels_quadrature(spec)
    d = wigner_d2(spec.geometry.alpha)
    val = kern
    for m in spec.m_indices:
        # contract the leading axis with the row of d belonging to m
        val = np.tensordot(d[m + 2], val, axes=(0, 0))
    pref = 1.0
    for m in spec.m_indices:
        pref *= ZETA_TILDE[m]
    out = complex(pref * val)
    return out


def _integral(order, ms, geom, method=IntegralMethod.ANALYTIC, **kw):
    cutoff = kw.pop("radial_cutoff", None)
    if order == 1 and cutoff is None:
        cutoff = 1e6 * geom.depth
    return dipolar_integral(IntegralSpec(order, tuple(ms), geom, cutoff, **kw), method)


# ------------------------------------------------------------- field moments

def mean_field(geom: SampleGeometry, c: PhysicalConstants = PhysicalConstants()) -> float:
    """gamma_e <B> = -pi n J sin(2 alpha), rad/us (signed)."""
    return -math.pi * geom.density * c.J * math.sin(2.0 * geom.alpha)


def mean_field_from_integrals(geom, c=PhysicalConstants(), method=IntegralMethod.QUADRATURE, **kw) -> float:
    total = _integral(1, (1,), geom, method, **kw) + _integral(1, (-1,), geom, method, **kw)
    return geom.density * c.J * total.real


def f2(alpha: float) -> float:
    return (35.0 * math.pi - 3.0 * math.pi * math.cos(4.0 * alpha)) / 256.0


def b_rms_sq(geom: SampleGeometry, c: PhysicalConstants = PhysicalConstants()) -> float:
    """gamma_e^2 B_rms^2 = n J^2 f2 / d^3, (rad/us)^2."""
    return geom.density * c.J**2 * f2(geom.alpha) / geom.depth**3


def b_rms_sq_from_integrals(geom, c=PhysicalConstants(), method=IntegralMethod.QUADRATURE, **kw) -> float:
    i11 = _integral(2, (1, 1), geom, method, **kw)
    im11 = _integral(2, (-1, 1), geom, method, **kw)
    return 2.0 * geom.density * c.J**2 * (i11 + im11).real


def b_rms_undriven(geom: SampleGeometry, c: PhysicalConstants = PhysicalConstants(),
                   method=IntegralMethod.ANALYTIC) -> tuple[float, float]:
    """Quantum (oscillating) and classical parts of the undriven instantaneous variance."""
    i11 = _integral(2, (1, 1), geom, method).real
    i1m1 = _integral(2, (1, -1), geom, method).real
    pre = geom.density * c.J**2 / math.pi**2
    return 8.0 * pre * i11, 4.0 * pre * (i1m1 - i11)


def b_rms_undriven_alt(geom: SampleGeometry, c: PhysicalConstants = PhysicalConstants()) -> tuple[float, float]:
    """Alternative closed forms expressed through B_rms^2 with a (13 cos 4a + 51) denominator.

    Kept for comparison only; they disagree with direct integration away from alpha = 0.
    """
    a = geom.alpha
    b2 = b_rms_sq(geom, c)
    den = 13.0 * math.cos(4 * a) + 51.0
    udq = 4.0 / math.pi**2 * b2 * 2.0 * math.sin(a) ** 2 * (1.0 - 13.0 * math.cos(2 * a)) / den
    udc = 4.0 / math.pi**2 * b2 * (28.0 * math.cos(2 * a) + 13.0 * math.cos(4 * a) + 87.0) / (4.0 * den)
    return udq, udc


THIRD_MOMENT_COEFFS = (270.0, 6.0)


def third_moment_szix(geom: SampleGeometry, c: PhysicalConstants = PhysicalConstants()) -> float:
    """Third cumulant coefficient n J^3 sum I_3^{(+-1,+-1,+-1)}, multiplying tau^3.

    Closed form -pi n J^3 (270 sin 2a - 6 sin 6a) / (4004 d^6).
    """
    a = geom.alpha
    s, t = THIRD_MOMENT_COEFFS
    return (-c.J**3 * geom.density * math.pi
            * (s * math.sin(2 * a) - t * math.sin(6 * a)) / (4004.0 * geom.depth**6))


def third_moment_from_integrals(geom, c=PhysicalConstants(), method=IntegralMethod.QUADRATURE, **kw) -> float:
    total = sum(_integral(3, ms, geom, method, **kw) for ms in product((1, -1), repeat=3))
    return geom.density * c.J**3 * total.real


def field_moments(geom: SampleGeometry, c: PhysicalConstants = PhysicalConstants()) -> FieldMoments:
    udq, udc = b_rms_undriven(geom, c)
    return FieldMoments(mean_field(geom, c), b_rms_sq(geom, c), f2(geom.alpha),
                        udq, udc, third_moment_szix(geom, c))
