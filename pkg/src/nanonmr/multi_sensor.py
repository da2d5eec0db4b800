"""Several sensors sharing one nuclear ensemble.

M sensors start in |up_X>^M and all couple identically to N nuclei. The
reduced sensor state depends on a Z-basis string only through its Hamming
weight, so it lives on the (M+1)-dimensional symmetric subspace, spanned by
the normalised Dicke states |D_j> (j sensors down).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import (
    BranchOverflow,
    DimensionTooLarge,
    IndexOutOfRange,
    InformationSingular,
    NotAProbabilityVector,
)
from .qfi import fidelity_qfi

__all__ = [
    "MultiSensorParams",
    "SymmetricState",
    "symmetric_rho",
    "symmetric_rho_derivative",
    "qfi_multi",
    "y_basis_coefficient",
    "y_basis_matrix",
    "y_basis_probs",
    "y_basis_probs_derivative",
    "fi_y",
    "brute_force_multi",
    "symmetric_isometry",
    "MAX_BRUTE_FORCE_SENSORS",
]

MAX_BRUTE_FORCE_SENSORS = 10
PROB_FLOOR = 1e-15
DERIV_FLOOR = 1e-12


@dataclass(frozen=True)
class MultiSensorParams:
    m_sensors: int
    n_nuclei: int
    g_tau: float
    theta: float
    t: float = 1.0

    def __post_init__(self):
        if self.m_sensors < 1 or self.n_nuclei < 1:
            raise ValueError("need M >= 1 and N >= 1")

    def with_theta(self, theta: float) -> "MultiSensorParams":
        return MultiSensorParams(self.m_sensors, self.n_nuclei, self.g_tau, theta, self.t)


@dataclass(frozen=True)
class SymmetricState:
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _check(p: MultiSensorParams) -> None:
    if abs(2.0 * p.g_tau) >= 0.5 * math.pi:
        raise BranchOverflow(f"|2 g tau| = {abs(2 * p.g_tau)} >= pi/2")


def _factor_powers(p: MultiSensorParams, diff: np.ndarray):
    """(cos(2 g tau D) + i sin(2 g tau D) cos theta)^N and its theta-derivative."""
    a = 2.0 * p.g_tau * diff
    z = np.cos(a) + 1j * np.sin(a) * math.cos(p.theta)
    n = p.n_nuclei
    zn = z**n
    dz = -1j * np.sin(a) * math.sin(p.theta)
    dzn = n * z ** (n - 1) * dz
    return zn, dzn


def _log_weights(m: int) -> np.ndarray:
    j = np.arange(m + 1)
    return 0.5 * (gammaln(m + 1) - gammaln(j + 1) - gammaln(m - j + 1) - m * math.log(2.0))


def symmetric_rho(p: MultiSensorParams) -> SymmetricState:
    _check(p)
    m = p.m_sensors
    j = np.arange(m + 1)
    diff = j[:, None] - j[None, :]
    zn, _ = _factor_powers(p, diff)
    lw = _log_weights(m)
    w = np.exp(lw[:, None] + lw[None, :])
    return SymmetricState(w * zn)


def symmetric_rho_derivative(p: MultiSensorParams) -> np.ndarray:
    """d rho / d omega_N."""
    _check(p)
    m = p.m_sensors
    j = np.arange(m + 1)
    _, dzn = _factor_powers(p, j[:, None] - j[None, :])
    lw = _log_weights(m)
    return np.exp(lw[:, None] + lw[None, :]) * dzn * p.t


def qfi_multi(p: MultiSensorParams, dtheta: float = 1e-5, scheme: str = "central") -> float:
    """QFI from the fidelity of neighbouring symmetric states.

    ``scheme``: "forward" compares theta and theta + dtheta; "central" compares
    theta -+ dtheta/2; "richardson" extrapolates the central estimate from
    steps dtheta and dtheta/2.
    """
    if scheme == "forward":
        a, b = symmetric_rho(p), symmetric_rho(p.with_theta(p.theta + dtheta))
        return fidelity_qfi(a.matrix, b.matrix, dtheta, p.t)
    if scheme == "central":
        a = symmetric_rho(p.with_theta(p.theta - 0.5 * dtheta))
        b = symmetric_rho(p.with_theta(p.theta + 0.5 * dtheta))
        return fidelity_qfi(a.matrix, b.matrix, dtheta, p.t)
    if scheme == "richardson":
        coarse = qfi_multi(p, dtheta, "central")
        fine = qfi_multi(p, 0.5 * dtheta, "central")
        return (4.0 * fine - coarse) / 3.0
    raise ValueError(f"unknown scheme {scheme!r}")


def y_basis_coefficient(s: int, s_z: int, m: int) -> int:
    """Signed binomial sum a_{s, s_z} = sum_k (-1)^k C(s_z, k) C(M - s_z, s - k)."""
    if not (0 <= s <= m and 0 <= s_z <= m):
        raise IndexOutOfRange(f"s={s}, s_z={s_z} outside [0, {m}]")
    return sum((-1) ** k * math.comb(s_z, k) * math.comb(m - s_z, s - k)
               for k in range(max(0, s + s_z - m), min(s, s_z) + 1))


@lru_cache(maxsize=64)
def y_basis_matrix(m: int) -> np.ndarray:
    """A[s, s_z] = a_{s, s_z} / 2^M as floats."""
    out = np.empty((m + 1, m + 1))
    for s in range(m + 1):
        for sz in range(m + 1):
            out[s, sz] = math.ldexp(float(y_basis_coefficient(s, sz, m)), -m)
    out.setflags(write=False)
    return out


def _y_kernel(p: MultiSensorParams):
    m = p.m_sensors
    j = np.arange(m + 1)
    diff = j[:, None] - j[None, :]
    zn, dzn = _factor_powers(p, diff)
    phase = (-1j) ** (diff % 4)
    return np.real(phase * zn), np.real(phase * dzn)


def _contract(a: np.ndarray, kern: np.ndarray) -> np.ndarray:
    """sum_x a_x^2 K_xx + 2 sum_{x<y} a_x a_y K_xy for every column of ``a``."""
    diag = np.einsum("xs,x->s", a * a, np.diag(kern))
    upper = np.triu(kern, 1)
    return diag + 2.0 * np.einsum("xs,xy,ys->s", a, upper, a)


_ROUNDOFF = 8.0 * np.finfo(float).eps


def _probs_with_bounds(p: MultiSensorParams, derivative: bool):
    """Values of the double sum together with a round-off bound for each entry."""
    _check(p)
    m = p.m_sensors
    kern, dkern = _y_kernel(p)
    k = dkern if derivative else kern
    a = y_basis_matrix(m)
    mult = np.array([math.comb(m, s) for s in range(m + 1)], dtype=float)
    val = mult * _contract(a, k)
    scale = mult * np.einsum("xs,xy,ys->s", np.abs(a), np.abs(k), np.abs(a))
    # rounding of z is amplified N-fold in z^N, on top of the (M+1)-term sums
    return val, _ROUNDOFF * (m + 1 + p.n_nuclei) * scale


def y_basis_probs(p: MultiSensorParams) -> np.ndarray:
    """Probability of s_z sensors found in |down_Y> (aggregated with multiplicity C(M, s_z)).

    The signed sums cancel heavily in the tails; entries smaller than their
    round-off bound carry no information and are clamped at zero.
    """
    val, bound = _probs_with_bounds(p, False)
    if np.any(val < -bound):
        raise NotAProbabilityVector("Y-basis probability below its round-off bound")
    return np.where(val < bound, np.maximum(val, 0.0), val)


def y_basis_probs_derivative(p: MultiSensorParams) -> np.ndarray:
    """d P_{s_z} / d omega_N."""
    val, _ = _probs_with_bounds(p, True)
    return val * p.t


def fi_y(p: MultiSensorParams) -> float:
    """Fisher information of measuring every sensor in the Y basis.

    Outcomes whose probability is not resolved above round-off are left out,
    the same way classical_fi skips vanishing probabilities.
    """
    prob, bound = _probs_with_bounds(p, False)
    dprob, dbound = _probs_with_bounds(p, True)
    if abs(prob.sum() - 1.0) > 1e-10:
        raise NotAProbabilityVector(f"Y-basis probabilities sum to {prob.sum()}")
    keep = prob > np.maximum(bound, PROB_FLOOR)
    total = float(np.sum(dprob[keep] ** 2 / prob[keep]))
    # a dropped outcome contributes at least dP^2 / (|P| + bound)
    resolved = ~keep & (np.abs(dprob) > np.maximum(dbound, DERIV_FLOOR))
    dropped = float(np.sum(dprob[resolved] ** 2 / (np.abs(prob[resolved]) + bound[resolved])))
    if dropped > 1e-6 * total:
        raise InformationSingular("unresolved Y-basis probability carries a resolved derivative")
    return total * p.t**2


def brute_force_multi(p: MultiSensorParams) -> np.ndarray:
    """Full 2^M x 2^M sensor density matrix, indexed by Z-basis bit strings."""
    _check(p)
    m = p.m_sensors
    if m > MAX_BRUTE_FORCE_SENSORS:
        raise DimensionTooLarge(f"M={m} exceeds {MAX_BRUTE_FORCE_SENSORS}")
    weights = np.array([bin(x).count("1") for x in range(2**m)])
    zn, _ = _factor_powers(p, weights[:, None] - weights[None, :])
    return zn / 2.0**m


def symmetric_isometry(m: int) -> np.ndarray:
    """Columns are the normalised Dicke states in the 2^M computational basis."""
    weights = np.array([bin(x).count("1") for x in range(2**m)])
    v = np.zeros((2**m, m + 1))
    for j in range(m + 1):
        v[weights == j, j] = 1.0 / math.sqrt(math.comb(m, j))
    return v
