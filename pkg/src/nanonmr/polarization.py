"""Partially polarised nuclei.

Each nucleus starts in |up_X> with probability p and in |down_X> otherwise;
pol = 2p - 1. The per-nucleus factor of the sensor coherence becomes
cos(2G) + i pol sin(2G) cos(theta), so the signal shrinks by pol while the
Bernoulli variance 4p(1-p) adds a theta-independent classical dephasing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .dipolar import PhysicalConstants, SampleGeometry, b_rms_sq, mean_field
from .errors import BranchOverflow, ExpansionInvalid
from .qfi import Coherence, CoherenceDerivative, QfiBreakdown, bures_qfi

__all__ = [
    "PolarizationParams",
    "coherence_pol",
    "coherence_pol_mixture",
    "ensemble_coherence_pol",
    "coherence_pol_ensemble",
    "coherence_pol_ensemble_derivative",
    "qfi_pol",
    "StrategyTimes",
    "strategy_times",
]


@dataclass(frozen=True)
class PolarizationParams:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p={self.p} outside [0, 1]")

    @classmethod
    def from_pol(cls, pol: float) -> "PolarizationParams":
        return cls(0.5 * (1.0 + pol))

    @property
    def pol(self) -> float:
        return 2.0 * self.p - 1.0

    @property
    def bernoulli_variance(self) -> float:
        return 4.0 * self.p * (1.0 - self.p)


def coherence_pol(G: float, pp: PolarizationParams, theta: float, strict: bool = True) -> Coherence:
    """Single-nucleus factor of the sensor coherence."""
    if strict and abs(2.0 * G) >= 0.5 * math.pi:
        raise BranchOverflow(f"|2G| = {abs(2 * G)} >= pi/2")
    s2 = math.sin(2.0 * G) ** 2
    r = math.sqrt(max(0.0, 1.0 - (pp.bernoulli_variance + pp.pol**2 * math.sin(theta) ** 2) * s2))
    phi = math.atan(pp.pol * math.cos(theta) * math.tan(2.0 * G))
    return Coherence(r, phi)


_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SZ = np.diag([1.0, -1.0]).astype(complex)


def coherence_pol_mixture(G: float, pp: PolarizationParams, theta: float) -> Coherence:
    """Oracle: evolve sensor + one nucleus from |up_X> and from |down_X>, then mix.

    Uses the coupling sigma_z (x) sigma_x with strength G, exponentiated by
    diagonalisation, and returns 2 rho_S[1, 0] of the mixed reduced state.
    """
    plus = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
    minus = np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0)
    precess = np.diag(np.exp(-0.5j * theta * np.array([1.0, -1.0])))
    h = np.kron(_SZ, _SX)
    w, v = np.linalg.eigh(h)
    u = (v * np.exp(-1j * G * w)) @ v.conj().T
    rho = np.zeros((2, 2), dtype=complex)
    for weight, nuc in ((pp.p, plus), (1.0 - pp.p, minus)):
        psi = u @ np.kron(plus, precess @ nuc)
        amp = psi.reshape(2, 2)
        rho += weight * amp @ amp.conj().T
    return Coherence.from_complex(complex(2.0 * rho[1, 0]))


def ensemble_coherence_pol(G_values, pp: PolarizationParams, theta: float) -> Coherence:
    """Product of single-nucleus factors for the couplings ``G_values`` (exact per nucleus)."""
    g = np.asarray(G_values, dtype=float)
    z = np.cos(2 * g) + 1j * pp.pol * np.sin(2 * g) * math.cos(theta)
    # keep the classical dephasing: |factor|^2 gains the Bernoulli variance term
    r = np.sqrt(np.clip(1.0 - (pp.bernoulli_variance + pp.pol**2 * math.sin(theta) ** 2)
                        * np.sin(2 * g) ** 2, 0.0, None))
    return Coherence(float(np.prod(r)), float(np.sum(np.angle(z))))


def _weak_rate(geom, tau, pp, constants):
    return 2.0 * b_rms_sq(geom, constants) * tau * tau


def coherence_pol_ensemble(geom: SampleGeometry, pp: PolarizationParams, tau: float, theta: float,
                           constants: PhysicalConstants = PhysicalConstants()) -> Coherence:
    """Ensemble coherence for tau << tau_D under the second-moment expansion."""
    k = _weak_rate(geom, tau, pp, constants)
    pol = pp.pol
    r = math.exp(-k * ((1.0 - pol * pol) + pol * pol * math.sin(theta) ** 2))
    return Coherence(r, 2.0 * pol * mean_field(geom, constants) * tau * math.cos(theta))


def coherence_pol_ensemble_derivative(geom, pp, tau, t, theta, constants=PhysicalConstants()) -> CoherenceDerivative:
    k = _weak_rate(geom, tau, pp, constants)
    pol = pp.pol
    r = coherence_pol_ensemble(geom, pp, tau, theta, constants).r
    dr = -k * pol * pol * math.sin(2.0 * theta) * r
    dphi = -2.0 * pol * mean_field(geom, constants) * tau * math.sin(theta)
    return CoherenceDerivative(dr * t, dphi * t)


def qfi_pol(geom: SampleGeometry, pp: PolarizationParams, tau: float, t: float, theta: float,
            constants: PhysicalConstants = PhysicalConstants()) -> QfiBreakdown:
    """QFI for tau << tau_D at polarisation pol."""
    mf, b2 = mean_field(geom, constants), b_rms_sq(geom, constants)
    if b2 >= mf * mf:
        warnings.warn("B_rms >= |<B>|: second-moment truncation is not justified",
                      ExpansionInvalid, stacklevel=2)
    return bures_qfi(coherence_pol_ensemble(geom, pp, tau, theta, constants),
                     coherence_pol_ensemble_derivative(geom, pp, tau, t, theta, constants))


@dataclass(frozen=True)
class StrategyTimes:
    tau1: float
    tau2: float
    qfi1: float
    qfi2: float


def strategy_times(geom: SampleGeometry, pp: PolarizationParams, theta: float, t: float = 1.0,
                   constants: PhysicalConstants = PhysicalConstants()) -> StrategyTimes:
    """Two strong back-action choices of the interaction window.

    Strategy 1 keeps sin^2(theta) = 1 and sets 4 B_rms^2 tau1^2 = 1. Strategy 2
    sets 4 B_rms^2 pol^2 sin^2(theta) tau2^2 = 1 and pays the classical
    dephasing exp(-4 B_rms^2 tau2^2 (1 - pol^2)).
    """
    mf, b2 = mean_field(geom, constants), b_rms_sq(geom, constants)
    pol = pp.pol
    tau1 = 1.0 / math.sqrt(4.0 * b2)
    s2 = math.sin(theta) ** 2
    tau2 = 1.0 / math.sqrt(4.0 * b2 * pol * pol * s2) if pol != 0 and s2 > 0 else math.inf
    base = t * t / math.e * mf * mf / b2
    qfi1 = base * pol * pol
    qfi2 = base * math.exp(-4.0 * b2 * tau2 * tau2 * (1.0 - pol * pol)) if math.isfinite(tau2) else 0.0
    return StrategyTimes(tau1, tau2, qfi1, qfi2)
