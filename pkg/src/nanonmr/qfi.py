"""Single-qubit information measures.

The sensor state after the protocol is a qubit whose X-Y coherence is written
in polar form ``r * exp(i * phi)``. Everything here works either on that polar
form (Bures QFI, X-Y basis Fisher information) or on explicit density matrices
(fidelity-based QFI).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateRadial,
    DimensionMismatch,
    InformationSingular,
    InvalidCoherence,
    NotAProbabilityVector,
    NotDensityMatrix,
)

__all__ = [
    "Coherence",
    "CoherenceDerivative",
    "QfiBreakdown",
    "MeasurementBasis",
    "canonical_angle",
    "bures_qfi",
    "fidelity",
    "infidelity",
    "fidelity_qfi",
    "classical_fi",
    "xy_probabilities",
    "fi_xy_basis",
    "optimal_measurement_angle",
    "qubit_density_matrix",
]

PROB_EPS = 1e-15
DP_EPS = 1e-12
PURE_TOL = 1e-12
PSD_FLOOR = -1e-10


@dataclass(frozen=True)
class Coherence:
    """Sensor coherence ``r e^{i phi}``."""

    r: float
    phi: float

    @classmethod
    def from_complex(cls, z: complex) -> "Coherence":
        return cls(abs(z), math.atan2(z.imag, z.real))

    def to_complex(self) -> complex:
        return self.r * complex(math.cos(self.phi), math.sin(self.phi))


@dataclass(frozen=True)
class CoherenceDerivative:
    """Derivatives of ``r`` and ``phi`` with respect to the nuclear Larmor frequency.

    Units are time (the free-evolution window enters through theta = omega_N t).
    """

    dr_domega: float
    dphi_domega: float


@dataclass(frozen=True)
class QfiBreakdown:
    i_r: float
    i_phi: float
    total: float

    @classmethod
    def from_terms(cls, i_r: float, i_phi: float) -> "QfiBreakdown":
        return cls(float(i_r), float(i_phi), float(i_r) + float(i_phi))


def canonical_angle(a: float) -> float:
    """Map an angle onto (-pi, pi]."""
    a = math.remainder(a, 2.0 * math.pi)
    return math.pi if a == -math.pi else a


@dataclass(frozen=True)
class MeasurementBasis:
    """Projective basis in the X-Y plane at angle ``alpha`` from sigma_x."""

    alpha: float

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise ValueError("basis angle must be finite")
        object.__setattr__(self, "alpha", canonical_angle(self.alpha))


def _check_coherence(c: Coherence) -> float:
    r = float(c.r)
    if not (math.isfinite(r) and math.isfinite(c.phi)):
        raise InvalidCoherence(f"non-finite coherence {c}")
    if r < 0.0 or r > 1.0 + 1e-12:
        raise InvalidCoherence(f"r={r} outside [0, 1]")
    return min(r, 1.0)


def bures_qfi(c: Coherence, dc: CoherenceDerivative) -> QfiBreakdown:
    """Bures QFI of the polar-form qubit, split into radial and rotational parts.

    >>> bures_qfi(Coherence(0.6, 0.0), CoherenceDerivative(0.3, 1.5)).total
    0.950625
    """
    r = _check_coherence(c)
    dr, dphi = float(dc.dr_domega), float(dc.dphi_domega)
    gap = 1.0 - r * r
    if gap < PURE_TOL:
        if abs(dr) >= 1e-8:
            raise DegenerateRadial(f"r={r} with dr={dr}")
        i_r = 0.0
    else:
        i_r = dr * dr / gap
    return QfiBreakdown.from_terms(i_r, r * r * dphi * dphi)


def qubit_density_matrix(c: Coherence) -> np.ndarray:
    """Density matrix 1/2 [[1, r e^{i phi}], [r e^{-i phi}, 1]]."""
    z = c.to_complex()
    return 0.5 * np.array([[1.0, z], [np.conj(z), 1.0]], dtype=complex)


def _check_density(rho: np.ndarray, name: str) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise NotDensityMatrix(f"{name} is not square")
    if np.max(np.abs(rho - rho.conj().T), initial=0.0) > 1e-10:
        raise NotDensityMatrix(f"{name} is not Hermitian")
    if abs(np.trace(rho) - 1.0) > 1e-10:
        raise NotDensityMatrix(f"{name} has trace {np.trace(rho).real}")
    return 0.5 * (rho + rho.conj().T)


def _psd_sqrt(rho: np.ndarray, name: str) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    if w.min() < PSD_FLOOR:
        raise NotDensityMatrix(f"{name} has eigenvalue {w.min():.3e}")
    w = np.sqrt(np.clip(w, 0.0, None))
    return (v * w) @ v.conj().T


def _pair(rho_a, rho_b):
    a = _check_density(rho_a, "rho_a")
    b = _check_density(rho_b, "rho_b")
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    return _psd_sqrt(a, "rho_a"), _psd_sqrt(b, "rho_b")


def fidelity(rho_a: np.ndarray, rho_b: np.ndarray) -> float:
    """Root fidelity Tr sqrt(sqrt(rho_a) rho_b sqrt(rho_a)).

    Evaluated as the trace norm of sqrt(rho_a) sqrt(rho_b), which is the same
    quantity without a third matrix root.
    """
    sa, sb = _pair(rho_a, rho_b)
    return float(np.linalg.svd(sa @ sb, compute_uv=False).sum())


def infidelity(rho_a: np.ndarray, rho_b: np.ndarray) -> float:
    """1 - fidelity, accurate even when the states nearly coincide.

    Uses 2(1 - F) = min_U ||sqrt(rho_a) - sqrt(rho_b) U||_F^2, attained at the
    polar unitary of sqrt(rho_a) sqrt(rho_b). The result is a sum of squares of
    small differences, so nothing cancels.
    """
    sa, sb = _pair(rho_a, rho_b)
    w, _, vh = np.linalg.svd(sa @ sb)
    diff = sa - sb @ (vh.conj().T @ w.conj().T)
    return 0.5 * float(np.sum(np.abs(diff) ** 2))


def fidelity_qfi(rho_a: np.ndarray, rho_b: np.ndarray, dtheta: float, t: float) -> float:
    """QFI with respect to omega_N from two states a step ``dtheta`` apart in theta."""
    if dtheta == 0:
        raise ValueError("dtheta must be non-zero")
    return 8.0 * infidelity(rho_a, rho_b) / dtheta**2 * t**2


def classical_fi(p, dp) -> float:
    """Fisher information of a discrete distribution given its derivative."""
    p = np.asarray(p, dtype=float)
    dp = np.asarray(dp, dtype=float)
    if p.shape != dp.shape or p.ndim != 1:
        raise NotAProbabilityVector("p and dp must be 1-d of equal length")
    if np.any(p < -PROB_EPS) or abs(p.sum() - 1.0) > 1e-10:
        raise NotAProbabilityVector(f"p sums to {p.sum()} or has negative entries")
    if abs(dp.sum()) > 1e-8:
        raise NotAProbabilityVector(f"dp sums to {dp.sum()}, expected 0")
    keep = p > PROB_EPS
    if np.any(~keep & (np.abs(dp) > DP_EPS)):
        raise InformationSingular("vanishing probability with finite derivative")
    return float(np.sum(dp[keep] ** 2 / p[keep]))


def xy_probabilities(c: Coherence, dc: CoherenceDerivative, basis: MeasurementBasis):
    """Outcome probabilities (+, -) and their derivatives for an X-Y plane basis."""
    delta = basis.alpha - c.phi
    cs, sn = math.cos(delta), math.sin(delta)
    x = c.r * cs
    dx = dc.dr_domega * cs + c.r * sn * dc.dphi_domega
    p = np.array([0.5 * (1 + x), 0.5 * (1 - x)])
    return p, np.array([0.5 * dx, -0.5 * dx])


def fi_xy_basis(
    c: Coherence,
    dc: CoherenceDerivative,
    basis: MeasurementBasis,
    rotation_only: bool = False,
) -> float:
    """Fisher information of a projective measurement in the X-Y plane.

    The default is exact and keeps both the radial and the rotational
    derivative. ``rotation_only`` drops the radial term.
    """
    r = _check_coherence(c)
    delta = basis.alpha - c.phi
    cs, sn = math.cos(delta), math.sin(delta)
    num = r * sn * dc.dphi_domega
    if not rotation_only:
        num += dc.dr_domega * cs
    den = 1.0 - (r * cs) ** 2
    if den <= 4 * PROB_EPS:
        if abs(num) <= 2 * DP_EPS:
            return 0.0
        raise InformationSingular("deterministic outcome with finite derivative")
    return num * num / den


def optimal_measurement_angle(c: Coherence) -> MeasurementBasis:
    """Basis perpendicular to the coherence phase, optimal when dr is ignored."""
    return MeasurementBasis(c.phi + 0.5 * math.pi)
