"""Undriven nuclei: a pi-pulse train on the sensor replaces the nuclear drive.

The pulse train flips the sign of the sensor-nucleus coupling every tau_p,
which is described by the square wave h(t) = (-1)^floor(t / tau_p) with
Fourier coefficients a_k = -2i / (pi k) for odd k. Nuclei precessing at
omega_N = omega_p + delta_omega are then seen through the first harmonic.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .dipolar import (
    IntegralSpec,
    PhysicalConstants,
    SampleGeometry,
    b_rms_sq,
    b_rms_undriven,
    dipolar_integral,
    mean_field,
)
from .errors import ExpansionInvalid, NonIntegrableSpectrum, StrategyInfeasible
from .qfi import Coherence, CoherenceDerivative, QfiBreakdown, bures_qfi

__all__ = [
    "Parity",
    "PulseTrain",
    "SpectrumFunction",
    "lorentzian_spectrum",
    "pulse_fourier_coefficient",
    "square_wave",
    "signal_undriven",
    "decay_undriven",
    "coherence_undriven",
    "coherence_undriven_derivative",
    "c2_instant",
    "c2_instant_cos2",
    "Strategy",
    "UndrivenOperatingPoint",
    "undriven_operating_point",
    "qfi_undriven",
    "filter_function",
    "filter_overlap_s2",
    "N_HARMONICS",
]

N_HARMONICS = 999


class Parity(enum.Enum):
    ODD = "odd"
    EVEN = "even"


@dataclass(frozen=True)
class PulseTrain:
    """Equally spaced pi pulses; ``parity`` refers to the pulse count."""

    tau_p: float
    delta_omega: float = 0.0
    parity: Parity = Parity.ODD

    def __post_init__(self):
        if not self.tau_p > 0:
            raise ValueError("tau_p must be positive")
        object.__setattr__(self, "parity", Parity(self.parity))
        if abs(self.delta_omega) > 0.1 * self.omega_p:
            warnings.warn("detuning is not small compared with the pulse frequency", stacklevel=2)

    @property
    def omega_p(self) -> float:
        return math.pi / self.tau_p

    @property
    def omega_n(self) -> float:
        return self.omega_p + self.delta_omega


@dataclass(frozen=True)
class SpectrumFunction:
    """Power spectral density S(w) of gamma_e B fluctuations, with integration support."""

    func: Callable[[np.ndarray], np.ndarray]
    support: tuple = (-math.inf, math.inf)

    def __call__(self, w):
        return self.func(w)


def lorentzian_spectrum(variance: float, width: float, support_widths: float = 2000.0) -> SpectrumFunction:
    """S(w) = variance * 2 width / (width^2 + w^2); its correlation is variance * exp(-width |t|)."""
    if width <= 0 or variance < 0:
        raise ValueError("need width > 0 and variance >= 0")
    lim = support_widths * width
    return SpectrumFunction(lambda w: variance * 2.0 * width / (width**2 + np.asarray(w) ** 2), (-lim, lim))


def pulse_fourier_coefficient(k: int, parity: Parity | str = Parity.ODD) -> complex:
    k = int(k)
    if k == 0:
        return 0j if Parity(parity) is Parity.ODD else 1 + 0j
    if k % 2 == 0:
        return 0j
    return -2j / (math.pi * k)


def square_wave(t, tau_p: float):
    """h(t) = (-1)^floor(t / tau_p)."""
    return 1.0 - 2.0 * (np.floor(np.asarray(t) / tau_p) % 2)


def signal_undriven(geom: SampleGeometry, pulse: PulseTrain, tau: float, t: float,
                    constants: PhysicalConstants = PhysicalConstants()) -> float:
    return 2.0 / math.pi * mean_field(geom, constants) * tau * math.sin(pulse.delta_omega * t)


def c2_instant(geom: SampleGeometry, delta_omega: float, t: float,
               constants: PhysicalConstants = PhysicalConstants()) -> float:
    """gamma_e^2 C_2^0(t) = udq cos^2(dw t) + udc."""
    udq, udc = b_rms_undriven(geom, constants)
    return udq * math.cos(delta_omega * t) ** 2 + udc


def c2_instant_cos2(geom: SampleGeometry, delta_omega: float, t: float,
                    constants: PhysicalConstants = PhysicalConstants()) -> float:
    """Same quantity written with cos(2 dw t) and the (1,1), (1,-1) integrals."""
    i11 = dipolar_integral(IntegralSpec(2, (1, 1), geom)).real
    i1m1 = dipolar_integral(IntegralSpec(2, (1, -1), geom)).real
    return 4.0 * geom.density * constants.J**2 / math.pi**2 * (
        math.cos(2.0 * delta_omega * t) * i11 + i1m1)


def decay_undriven(geom, pulse: PulseTrain, tau: float, t: float,
                   constants: PhysicalConstants = PhysicalConstants()) -> float:
    return math.exp(-tau * tau * c2_instant(geom, pulse.delta_omega, t, constants))


def coherence_undriven(geom, pulse, tau, t, constants=PhysicalConstants()) -> Coherence:
    return Coherence(decay_undriven(geom, pulse, tau, t, constants),
                     signal_undriven(geom, pulse, tau, t, constants))


def coherence_undriven_derivative(geom, pulse, tau, t, constants=PhysicalConstants()) -> CoherenceDerivative:
    """Derivatives with respect to omega_N (equivalently delta_omega)."""
    udq, _ = b_rms_undriven(geom, constants)
    x = pulse.delta_omega * t
    r = decay_undriven(geom, pulse, tau, t, constants)
    dr = r * tau * tau * udq * math.sin(2.0 * x) * t
    dphi = 2.0 / math.pi * mean_field(geom, constants) * tau * math.cos(x) * t
    return CoherenceDerivative(dr, dphi)


class Strategy(enum.Enum):
    PEAK_ENTANGLEMENT = "peak-entanglement"
    PEAK_SIGNAL = "peak-signal"


@dataclass(frozen=True)
class UndrivenOperatingPoint:
    strategy: Strategy
    tau: float
    cos2: float
    qfi_closed_form: float
    qfi_exact: QfiBreakdown = field(repr=False)


def _warn_expansion(geom, constants):
    mf, b2 = mean_field(geom, constants), b_rms_sq(geom, constants)
    if b2 >= mf * mf:
        warnings.warn("B_rms >= |<B>|: second-moment truncation is not justified",
                      ExpansionInvalid, stacklevel=3)


def undriven_operating_point(geom: SampleGeometry, pulse: PulseTrain, t: float,
                             strategy: Strategy | str, tau: float | None = None,
                             constants: PhysicalConstants = PhysicalConstants()) -> UndrivenOperatingPoint:
    """Interaction window, phase condition and QFI for one of the two strong back-action strategies.

    PEAK_ENTANGLEMENT sets cos^2(dw t) = 1 / (|udq| tau^2), with tau^2 = 1 / udc unless
    given, and reports <B>^2 t^2 exp(-udc tau^2) / (e^sgn(udq) |udq|).
    PEAK_SIGNAL sets cos^2(dw t) = 1 and tau = pi / (sqrt 2 B_rms) and reports
    (2/e) (<B> / B_rms)^2 t^2. ``qfi_exact`` is the Bures QFI of the undriven
    coherence evaluated at the same operating point.
    """
    strategy = Strategy(strategy)
    _warn_expansion(geom, constants)
    mf = mean_field(geom, constants)
    b2 = b_rms_sq(geom, constants)
    udq, udc = b_rms_undriven(geom, constants)
    if strategy is Strategy.PEAK_SIGNAL:
        tau = math.pi / math.sqrt(2.0 * b2)
        cos2 = 1.0
        closed = 2.0 / math.e * mf * mf / b2 * t * t
    else:
        if tau is None:
            if udc <= 0:
                raise StrategyInfeasible("no classical dephasing to set the window")
            tau = 1.0 / math.sqrt(udc)
        if udq == 0:
            raise StrategyInfeasible("no oscillating (entangling) part at this tilt")
        cos2 = 1.0 / (abs(udq) * tau * tau)
        if cos2 > 1.0:
            raise StrategyInfeasible(f"required cos^2(dw t) = {cos2:.4g} > 1")
        closed = (mf * mf * t * t / (math.exp(math.copysign(1.0, udq)) * abs(udq))
                  * math.exp(-udc * tau * tau))
    x = math.acos(math.sqrt(cos2)) if t > 0 else 0.0
    dw = x / t if t > 0 else 0.0
    train = PulseTrain(pulse.tau_p, dw, pulse.parity) if abs(dw) <= 0.1 * pulse.omega_p else None
    if train is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            train = PulseTrain(pulse.tau_p, dw, pulse.parity)
    exact = bures_qfi(coherence_undriven(geom, train, tau, t, constants),
                      coherence_undriven_derivative(geom, train, tau, t, constants))
    return UndrivenOperatingPoint(strategy, tau, cos2, closed, exact)


def qfi_undriven(geom: SampleGeometry, pulse: PulseTrain, t: float, strategy: Strategy | str,
                 tau: float | None = None, constants: PhysicalConstants = PhysicalConstants()) -> float:
    """Closed-form QFI of a strong back-action strategy (see ``undriven_operating_point``)."""
    return undriven_operating_point(geom, pulse, t, strategy, tau, constants).qfi_closed_form


# ------------------------------------------------------------ filter overlap

def _harmonics(pulse: PulseTrain, n_harmonics: int):
    ks = np.arange(-n_harmonics, n_harmonics + 1)
    ks = ks[(ks % 2 == 1) | ((ks == 0) & (pulse.parity is Parity.EVEN))]
    coeffs = np.array([pulse_fourier_coefficient(k, pulse.parity) for k in ks])
    return ks, coeffs


def _h_transform(w: np.ndarray, tau: float, pulse: PulseTrain, ks, coeffs) -> np.ndarray:
    """int_0^tau h(t) e^{-i w t} dt with h replaced by its truncated Fourier series."""
    nu = ks[None, :] * pulse.omega_p - np.asarray(w, dtype=float)[:, None]
    small = np.abs(nu * tau) < 1e-8
    safe = np.where(small, 1.0, nu)
    seg = np.where(small, tau + 0.5j * nu * tau * tau, np.expm1(1j * safe * tau) / (1j * safe))
    return seg @ coeffs


def filter_function(w, pulse: PulseTrain, tau: float, n_harmonics: int = N_HARMONICS) -> np.ndarray:
    """|h_w|^2 normalised to unit weight at the first harmonic: |H_tau(w)|^2 / (2 pi tau |a_1|^2)."""
    ks, coeffs = _harmonics(pulse, n_harmonics)
    w = np.atleast_1d(np.asarray(w, dtype=float))
    h = _h_transform(w, tau, pulse, ks, coeffs)
    return np.abs(h) ** 2 / (2.0 * math.pi * tau * abs(coeffs[ks == 1][0]) ** 2)


def _short_time_s2(pulse: PulseTrain, tau: float, geom: SampleGeometry, constants) -> float:
    # exact segment-wise integral of h(t) e^{-i w_p t} over [0, tau]
    wp = pulse.omega_p
    edges = np.arange(0.0, tau, pulse.tau_p)
    edges = np.append(edges, tau)
    lo, hi = edges[:-1], edges[1:]
    signs = 1.0 - 2.0 * (np.arange(lo.size) % 2)
    seg = (np.exp(-1j * wp * hi) - np.exp(-1j * wp * lo)) / (-1j * wp)
    p_minus = complex(np.sum(signs * seg))  # int h e^{-i wp t}
    p_plus = p_minus.conjugate()

    def i2(m1, m2):
        return dipolar_integral(IntegralSpec(2, (m1, m2), geom))

    val = (-0.25 * i2(-1, -1) * p_plus**2 - 0.25 * i2(1, 1) * p_minus**2
           + 0.25 * i2(-1, 1) * p_plus * p_minus + 0.25 * i2(1, -1) * p_minus * p_plus)
    return geom.density * constants.J**2 * val.real


def filter_overlap_s2(pulse: PulseTrain, spectrum: SpectrumFunction | None, tau: float, *,
                      mode: str = "filter", geometry: SampleGeometry | None = None,
                      constants: PhysicalConstants = PhysicalConstants(),
                      n_harmonics: int = N_HARMONICS, windows: int = 2) -> float:
    """Second moment s_2 of the filtered couplings.

    ``mode="filter"``: (tau / 2 pi) int |h_w|^2 S(w - dw - w_p) dw, with |h_w|^2
    from ``filter_function``. The integral runs over the harmonic windows
    [(k-1) w_p, (k+1) w_p] for odd |k| <= 2 windows - 1, intersected with the
    spectrum support, by adaptive quadrature on sub-intervals spanning a
    few filter oscillations each. For a spectrum broad compared with 1/tau
    and narrow compared with w_p this tends to (tau / 2 pi) S(dw).

    ``mode="short-time"``: correlations frozen over the window (tau << tau_D);
    evaluates the double time integral with the second-order dipolar integrals
    of ``geometry``.
    """
    if mode == "short-time":
        if geometry is None:
            raise ValueError("short-time mode needs a geometry")
        return _short_time_s2(pulse, tau, geometry, constants)
    if mode != "filter":
        raise ValueError(f"unknown mode {mode!r}")
    if spectrum is None:
        return 0.0
    ks, coeffs = _harmonics(pulse, n_harmonics)
    norm = 1.0 / (4.0 * math.pi**2 * abs(pulse_fourier_coefficient(1)) ** 2)
    centre = pulse.omega_n
    wp = pulse.omega_p
    lo_s, hi_s = spectrum.support

    def integrand(w):
        w = np.atleast_1d(w)
        s = np.asarray(spectrum(w - centre), dtype=float)
        if not np.all(np.isfinite(s)) or np.any(s < 0):
            raise NonIntegrableSpectrum("spectrum must be finite and non-negative")
        return np.abs(_h_transform(w, tau, pulse, ks, coeffs)) ** 2 * s

    piece = 16.0 * math.pi / tau  # about eight filter oscillations
    total = 0.0
    for k in range(-(2 * windows - 1), 2 * windows, 2):
        a = max((k - 1) * wp, centre + lo_s)
        b = min((k + 1) * wp, centre + hi_s)
        if b <= a:
            continue
        edges = np.linspace(a, b, max(2, int(math.ceil((b - a) / piece)) + 1))
        for x0, x1 in zip(edges[:-1], edges[1:]):
            with warnings.catch_warnings():
                warnings.simplefilter("error", integrate.IntegrationWarning)
                try:
                    val, _ = integrate.quad(lambda w: integrand(w)[0], x0, x1,
                                            limit=200, epsabs=0.0, epsrel=1e-10)
                except integrate.IntegrationWarning as exc:
                    raise NonIntegrableSpectrum(str(exc)) from exc
            total += val
    return norm * total
