"""Constant-coupling toy model: N nuclei, all coupled to the sensor with the same g.

Protocol: sensor and nuclei start in |up_X>, the nuclei precess freely for a
time t (theta = omega_N t), then the sensor interacts with all of them for a
time tau. The sensor coherence is a product of identical single-nucleus
factors ``z = cos(2 g tau) + i sin(2 g tau) cos(theta)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from functools import reduce

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import BranchOverflow, DimensionTooLarge
from .qfi import Coherence, CoherenceDerivative, QfiBreakdown, bures_qfi

__all__ = [
    "SimpleModelParams",
    "BackAction",
    "RegimeReport",
    "OptimalQfi",
    "single_spin_factor",
    "coherence_exact",
    "coherence_exact_derivative",
    "coherence_weak",
    "coherence_weak_derivative",
    "prob_up_y",
    "prob_up_y_derivative",
    "qfi_components",
    "optimal_theta",
    "qfi_optimal",
    "qfi_max_over_theta",
    "brute_force_coherence",
]

MAX_BRUTE_FORCE_NUCLEI = 12


@dataclass(frozen=True)
class SimpleModelParams:
    """Parameters of the toy model.

    ``omega_0`` (sensor gap) is kept for completeness only; it drops out in the
    interaction picture and no function reads it.
    """

    n_nuclei: int
    g: float
    tau: float
    t: float
    omega_n: float
    omega_0: float = 0.0

    def __post_init__(self):
        if int(self.n_nuclei) != self.n_nuclei or self.n_nuclei < 1:
            raise ValueError(f"n_nuclei must be a positive integer, got {self.n_nuclei}")
        if self.tau < 0 or self.t < 0:
            raise ValueError("tau and t must be non-negative")

    @classmethod
    def from_dimensionless(cls, n_nuclei: int, g_tau: float, theta: float,
                           t: float = 1.0, tau: float = 1.0) -> "SimpleModelParams":
        """Build parameters from (N, g tau, theta); theta = omega_N t."""
        if t == 0 and theta != 0:
            raise ValueError("theta must be 0 when t = 0")
        return cls(int(n_nuclei), g_tau / tau, tau, t, theta / t if t else 0.0)

    @property
    def g_tau(self) -> float:
        return self.g * self.tau

    @property
    def theta(self) -> float:
        return self.omega_n * self.t

    def with_omega_n(self, omega_n: float) -> "SimpleModelParams":
        return replace(self, omega_n=omega_n)

    def with_theta(self, theta: float) -> "SimpleModelParams":
        return self.with_omega_n(theta / self.t)


class BackAction(enum.Enum):
    WEAK = "weak"
    STRONG = "strong"


@dataclass(frozen=True)
class RegimeReport:
    back_action: float
    regime: BackAction
    theta_opt: float


@dataclass(frozen=True)
class OptimalQfi:
    value: float
    formula: str
    regime: BackAction


def _check_branch(g_tau: float, strict: bool) -> None:
    if strict and abs(2.0 * g_tau) >= 0.5 * math.pi:
        raise BranchOverflow(f"|2 g tau| = {abs(2 * g_tau)} >= pi/2")


def single_spin_factor(g_tau: float, theta: float) -> complex:
    return complex(math.cos(2 * g_tau), math.sin(2 * g_tau) * math.cos(theta))


def coherence_exact(p: SimpleModelParams, strict: bool = True) -> Coherence:
    _check_branch(p.g_tau, strict)
    z = single_spin_factor(p.g_tau, p.theta)
    n = p.n_nuclei
    # r from q = |z|^2 directly: abs(z) ** n would amplify the rounding of |z| by n
    return Coherence(_q(p.g_tau, p.theta) ** (0.5 * n), n * math.atan2(z.imag, z.real))


def _q(g_tau: float, theta: float) -> float:
    # |z|^2 = 1 - sin^2(2 g tau) sin^2(theta)
    return 1.0 - (math.sin(2 * g_tau) * math.sin(theta)) ** 2


def coherence_exact_derivative(p: SimpleModelParams) -> CoherenceDerivative:
    n, th, gt = p.n_nuclei, p.theta, p.g_tau
    s2, c2 = math.sin(2 * gt), math.cos(2 * gt)
    q = _q(gt, th)
    st, ct = math.sin(th), math.cos(th)
    dr = -n * s2 * s2 * st * ct * q ** (0.5 * n - 1.0)
    dphi = -n * c2 * s2 * st / q
    return CoherenceDerivative(dr * p.t, dphi * p.t)


def coherence_weak(p: SimpleModelParams) -> Coherence:
    n, gt, th = p.n_nuclei, p.g_tau, p.theta
    return Coherence(math.exp(-2 * n * gt * gt * math.sin(th) ** 2),
                     2 * n * gt * math.cos(th))


def coherence_weak_derivative(p: SimpleModelParams) -> CoherenceDerivative:
    n, gt, th = p.n_nuclei, p.g_tau, p.theta
    r = math.exp(-2 * n * gt * gt * math.sin(th) ** 2)
    dr = -2 * n * gt * gt * math.sin(2 * th) * r
    dphi = -2 * n * gt * math.sin(th)
    return CoherenceDerivative(dr * p.t, dphi * p.t)


def prob_up_y(p: SimpleModelParams, exact: bool = False) -> float:
    """Probability of finding the sensor in |up_Y>.

    The default is the weak-coupling expression; ``exact=True`` uses the
    product form, P = (1 + Im[r e^{i phi}]) / 2.
    """
    if exact:
        c = coherence_exact(p, strict=False)
        return 0.5 * (1.0 + c.r * math.sin(c.phi))
    n, g, tau, th = p.n_nuclei, p.g, p.tau, p.theta
    decay = math.exp(-2 * g * g * n * tau * tau * math.sin(th) ** 2)
    return 0.5 * (1.0 + decay * math.sin(2 * g * n * tau * math.cos(th)))


def prob_up_y_derivative(p: SimpleModelParams, exact: bool = False) -> float:
    """d prob_up_y / d omega_N."""
    n, th = p.n_nuclei, p.theta
    if exact:
        gt = p.g_tau
        z = single_spin_factor(gt, th)
        dz = complex(0.0, -math.sin(2 * gt) * math.sin(th))
        return 0.5 * (n * z ** (n - 1) * dz).imag * p.t
    g, tau = p.g, p.tau
    a = 2 * g * g * n * tau * tau
    b = 2 * g * n * tau
    decay = math.exp(-a * math.sin(th) ** 2)
    d = decay * (-a * math.sin(2 * th) * math.sin(b * math.cos(th))
                 - b * math.sin(th) * math.cos(b * math.cos(th)))
    return 0.5 * d * p.t


def qfi_components(p: SimpleModelParams) -> QfiBreakdown:
    """Exact radial and rotational QFI of the toy model."""
    n, th, gt, t = p.n_nuclei, p.theta, p.g_tau, p.t
    s2sq = math.sin(2 * gt) ** 2
    c2sq = math.cos(2 * gt) ** 2
    st2, ct2 = math.sin(th) ** 2, math.cos(th) ** 2
    q = _q(gt, th)
    i_phi = n * n * t * t * s2sq * c2sq * st2 * q ** (n - 2)
    qn = q ** n
    if 1.0 - qn < 1e-300:
        i_r = 0.0
    else:
        i_r = n * n * t * t * s2sq * s2sq * st2 * ct2 * q ** (n - 2) / (1.0 - qn)
    return QfiBreakdown.from_terms(i_r, i_phi)


def optimal_theta(n_nuclei: int, g_tau: float) -> RegimeReport:
    """Interrogation angle maximising the rotational information."""
    if n_nuclei < 1 or not 0 < 2 * g_tau < 0.5 * math.pi:
        raise ValueError("need N >= 1 and 0 < 2 g tau < pi/2")
    x = 1.0 / (n_nuclei * math.sin(2 * g_tau) ** 2)
    back_action = n_nuclei * g_tau * g_tau
    if x < 1.0:
        return RegimeReport(back_action, BackAction.STRONG, math.asin(math.sqrt(x)))
    return RegimeReport(back_action, BackAction.WEAK, 0.5 * math.pi)


def qfi_optimal(p: SimpleModelParams) -> OptimalQfi:
    """Leading-order closed form for the QFI at the optimal angle.

    Weak back-action: (2 g tau)^2 N^2 t^2. Strong back-action: N t^2 / e.
    """
    rep = optimal_theta(p.n_nuclei, abs(p.g_tau))
    n, t = p.n_nuclei, p.t
    if rep.regime is BackAction.WEAK:
        phi = 2 * p.g_tau
        return OptimalQfi(phi * phi * n * n * t * t, "phi^2 N^2 t^2, phi = 2 g tau", rep.regime)
    return OptimalQfi(n * t * t / math.e, "N t^2 / e", rep.regime)


def qfi_max_over_theta(n_nuclei: int, g_tau: float, t: float = 1.0) -> tuple[float, float]:
    """Numerical maximum of the exact QFI over theta in (0, pi/2]; returns (qfi, theta)."""

    def neg(th):
        return -qfi_components(SimpleModelParams.from_dimensionless(n_nuclei, g_tau, th, t)).total

    grid = np.linspace(1e-6, 0.5 * math.pi, 2049)
    vals = np.array([neg(th) for th in grid])
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    if hi - lo <= 0:
        return -vals[i], grid[i]
    res = minimize_scalar(neg, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    if res.fun < vals[i]:
        return -float(res.fun), float(res.x)
    return -float(vals[i]), float(grid[i])


_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SZ = np.diag([1.0, -1.0]).astype(complex)
_I2 = np.eye(2, dtype=complex)


_HAD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


def _embed(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    ops = [_I2] * n_sites
    ops[site] = op
    return reduce(np.kron, ops)


def brute_force_coherence(p: SimpleModelParams) -> Coherence:
    """Statevector oracle for the toy model.

    Sensor and N nuclei start in |+>. The coupling g sigma_z^S sum_j sigma_x^j
    is block diagonal in the sensor Z basis, so the nuclear register evolves
    under exp(-/+ i g tau X) with X = sum_j sigma_x^j assembled as a dense
    2^N matrix. X is diagonalised by the Hadamard transform, whose entries are
    +-2^(-N/2); working in that basis avoids eigenvector round-off, which
    otherwise dominates the phase when |rho_S[1, 0]| is tiny.
    """
    n = p.n_nuclei
    if n > MAX_BRUTE_FORCE_NUCLEI:
        raise DimensionTooLarge(f"N={n} exceeds {MAX_BRUTE_FORCE_NUCLEI}")
    plus = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
    nuc = reduce(np.kron, [plus] * n)

    # free nuclear precession, omega_N sum_j sigma_z^j / 2, diagonal
    zdiag = sum(np.real(np.diag(_embed(_SZ, j, n))) for j in range(n))
    nuc = np.exp(-0.5j * p.omega_n * p.t * zdiag) * nuc

    x_tot = sum(_embed(_SX, j, n) for j in range(n))
    had = reduce(np.kron, [_HAD] * n)
    w = np.diag(had @ x_tot @ had)
    c = had @ nuc
    up = had @ (np.exp(-1j * w * p.g * p.tau) * c)
    down = had @ (np.exp(1j * w * p.g * p.tau) * c)
    # rho_S[1, 0] = <up-branch | down-branch> / 2 with equal sensor weights
    return Coherence.from_complex(complex(np.vdot(up, down)))


def qfi_components_numeric(p: SimpleModelParams, step: float = 1e-6) -> QfiBreakdown:
    """Bures QFI from coherence_exact with central finite differences in omega_N."""
    c = coherence_exact(p, strict=False)
    hi = coherence_exact(SimpleModelParams(p.n_nuclei, p.g, p.tau, p.t, p.omega_n + step), strict=False)
    lo = coherence_exact(SimpleModelParams(p.n_nuclei, p.g, p.tau, p.t, p.omega_n - step), strict=False)
    dphi = math.remainder(hi.phi - lo.phi, 2 * math.pi)
    return bures_qfi(c, CoherenceDerivative((hi.r - lo.r) / (2 * step), dphi / (2 * step)))
