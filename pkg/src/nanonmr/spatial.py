"""Driven-nuclei protocol with position-dependent couplings.

The ensemble coherence after the interaction window is characterised by the
first two moments of the accumulated couplings G_j. Three asymptotic regimes
are covered: short windows (tau << tau_D), diffusion-limited windows
(tau >> tau_D) and windows long enough to sample the whole finite volume.
"""

from __future__ import annotations

import enum
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dipolar import (
    PhysicalConstants,
    SampleGeometry,
    b_rms_sq,
    coupling_g,
    mean_field,
)
from .errors import BoxTooSmall, ExpansionInvalid, MissingVolume
from .qfi import Coherence, CoherenceDerivative, QfiBreakdown

__all__ = [
    "Regime",
    "SpatialProtocolParams",
    "resolve_regime",
    "signal_phase",
    "decay_exponent",
    "decay",
    "coherence_spatial",
    "coherence_spatial_derivative",
    "qfi_spatial",
    "noise_signal_ratio",
    "optimal_theta_spatial",
    "critical_depth",
    "DiffusionTrajectory",
    "MonteCarloMoments",
    "mc_diffusion_oracle",
    "truncated_second_moment_fraction",
]

FINITE_VOLUME_PREFACTOR = 17.5
INSTANTANEOUS_FRACTION = 0.1


class Regime(enum.Enum):
    INSTANTANEOUS = "instantaneous"
    DIFFUSION_LIMITED = "diffusion-limited"
    FINITE_VOLUME = "finite-volume"
    AUTO = "auto"


@dataclass(frozen=True)
class SpatialProtocolParams:
    geometry: SampleGeometry
    tau: float
    t: float
    omega_n: float
    regime: Regime = Regime.AUTO
    constants: PhysicalConstants = PhysicalConstants()

    @property
    def theta(self) -> float:
        return self.omega_n * self.t

    def with_theta(self, theta: float) -> "SpatialProtocolParams":
        return SpatialProtocolParams(self.geometry, self.tau, self.t,
                                     theta / self.t, self.regime, self.constants)


def resolve_regime(p: SpatialProtocolParams) -> Regime:
    """Pick the asymptotic regime for ``p`` unless one was forced."""
    if p.regime is not Regime.AUTO:
        return p.regime
    g = p.geometry
    if g.volume is not None and g.diffusion > 0:
        onset = g.tau_v * g.volume ** (1.0 / 3.0) / (FINITE_VOLUME_PREFACTOR * g.depth)
        if p.tau >= onset:
            return Regime.FINITE_VOLUME
    if p.tau <= INSTANTANEOUS_FRACTION * g.tau_d:
        return Regime.INSTANTANEOUS
    return Regime.DIFFUSION_LIMITED


def signal_phase(p: SpatialProtocolParams) -> float:
    return 2.0 * mean_field(p.geometry, p.constants) * p.tau * math.cos(p.theta)


def _decay_rate(p: SpatialProtocolParams) -> float:
    """K such that r = exp(-K sin^2 theta)."""
    regime = resolve_regime(p)
    g = p.geometry
    if regime is Regime.INSTANTANEOUS:
        return 2.0 * b_rms_sq(g, p.constants) * p.tau**2
    if regime is Regime.DIFFUSION_LIMITED:
        return 2.0 * b_rms_sq(g, p.constants) * p.tau * g.tau_d
    if g.volume is None:
        raise MissingVolume("finite-volume regime needs a sample volume")
    return 2.0 / (g.density * g.volume) * mean_field(g, p.constants) ** 2 * p.tau**2


def decay_exponent(p: SpatialProtocolParams) -> float:
    return _decay_rate(p) * math.sin(p.theta) ** 2


def decay(p: SpatialProtocolParams) -> float:
    return math.exp(-decay_exponent(p))


def coherence_spatial(p: SpatialProtocolParams) -> Coherence:
    return Coherence(decay(p), signal_phase(p))


def coherence_spatial_derivative(p: SpatialProtocolParams) -> CoherenceDerivative:
    k = _decay_rate(p)
    th = p.theta
    r = math.exp(-k * math.sin(th) ** 2)
    dr = -k * math.sin(2.0 * th) * r
    dphi = -2.0 * mean_field(p.geometry, p.constants) * p.tau * math.sin(th)
    return CoherenceDerivative(dr * p.t, dphi * p.t)


def qfi_spatial(p: SpatialProtocolParams) -> QfiBreakdown:
    """Signal (rotational) and noise (radial) QFI terms for the active regime."""
    mf = mean_field(p.geometry, p.constants)
    b2 = b_rms_sq(p.geometry, p.constants)
    if b2 >= mf * mf:
        warnings.warn(f"B_rms^2={b2:.4g} >= <B>^2={mf * mf:.4g}; second-moment truncation "
                      "is not justified", ExpansionInvalid, stacklevel=2)
    k = _decay_rate(p)
    th, t = p.theta, p.t
    x = k * math.sin(th) ** 2
    i_phi = 4.0 * mf * mf * p.tau**2 * t * t * math.sin(th) ** 2 * math.exp(-2.0 * x)
    dx = k * math.sin(2.0 * th)
    i_r = 0.0 if x == 0.0 else dx * dx * t * t * math.exp(-2.0 * x) / -math.expm1(-2.0 * x)
    return QfiBreakdown.from_terms(i_r, i_phi)


def noise_signal_ratio(q: QfiBreakdown) -> float:
    return q.i_r / q.i_phi if q.i_phi > 0 else math.inf


def optimal_theta_spatial(p: SpatialProtocolParams) -> float:
    regime = resolve_regime(p)
    g = p.geometry
    if regime is Regime.INSTANTANEOUS:
        s2 = 1.0 / (4.0 * b_rms_sq(g, p.constants) * p.tau**2)
    elif regime is Regime.DIFFUSION_LIMITED:
        s2 = 1.0 / (4.0 * b_rms_sq(g, p.constants) * p.tau * g.tau_d)
    else:
        if g.volume is None:
            raise MissingVolume("finite-volume regime needs a sample volume")
        s2 = g.density * g.volume / (4.0 * mean_field(g, p.constants) ** 2 * p.tau**2)
    return 0.5 * math.pi if s2 >= 1.0 else math.asin(math.sqrt(s2))


def critical_depth(geom: SampleGeometry, pol: float, t2_nv: float,
                   constants: PhysicalConstants = PhysicalConstants()) -> float:
    """Depth at which pol * gamma_e B_rms * T2 = 1, using the d^-3/2 law from geom.depth."""
    if not 0 < pol <= 1 or not t2_nv > 0:
        raise ValueError("need 0 < pol <= 1 and t2_nv > 0")
    b = math.sqrt(b_rms_sq(geom, constants))
    return geom.depth * (pol * b * t2_nv) ** (2.0 / 3.0)


# ---------------------------------------------------------------- Monte Carlo

@dataclass(frozen=True)
class DiffusionTrajectory:
    """Sample paths in lab coordinates (surface at z = 0, sensor at z = -d)."""

    positions: np.ndarray  # (particles, steps + 1, 3), nm
    couplings: np.ndarray  # accumulated G_j, (particles,)


@dataclass(frozen=True)
class MonteCarloMoments:
    mean_sum_g: float
    se_sum_g: float
    mean_sum_g2: float
    se_sum_g2: float
    n_particles: int
    trajectories: DiffusionTrajectory | None = None


CHUNK = 1 << 15


def _rotation_lab_to_nv(alpha: float) -> np.ndarray:
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _couplings(pos: np.ndarray, depth: float, rot: np.ndarray, constants) -> np.ndarray:
    rel = pos.copy()
    rel[..., 2] += depth
    nv = rel @ rot.T
    r = np.linalg.norm(nv, axis=-1)
    theta = np.arccos(np.clip(nv[..., 2] / r, -1.0, 1.0))
    phi = np.arctan2(nv[..., 1], nv[..., 0])
    return coupling_g(r, theta, phi, constants)


def _sample_initial(rng: np.random.Generator, n: int, depth: float, extent: float):
    """Positions in {z > 0, |r - r_NV| < extent} with a two-component importance density.

    Component 1 has radial density ~ 1/r (flat in log r), component 2 ~ 1/r^4,
    both with cos(theta_lab) uniform on [d/R, 1] and uniform azimuth. Returns
    lab positions and the inverse joint density.
    """
    eps = depth / extent
    u = rng.uniform(eps, 1.0, n)
    azim = rng.uniform(0.0, 2.0 * math.pi, n)
    pick = rng.random(n) < 0.5
    v = rng.random(n)
    rmin = depth / u
    log_span = np.log(extent / rmin)
    r_log = rmin * np.exp(v * log_span)
    a, b = rmin**-3, extent**-3
    r_pow = (a - v * (a - b)) ** (-1.0 / 3.0)
    r = np.where(pick, r_log, r_pow)
    ang = 1.0 / (2.0 * math.pi * (1.0 - eps))
    p1 = ang / (log_span * r**3)
    p2 = ang * 3.0 / ((a - b) * r**6)
    inv_density = 1.0 / (0.5 * p1 + 0.5 * p2)
    s = np.sqrt(1.0 - u * u)
    pos = np.stack([r * s * np.cos(azim), r * s * np.sin(azim), r * u - depth], axis=-1)
    return pos, inv_density


def _run_chunk(args):
    (index, n, seed, geom, tau, steps, extent, constants, keep) = args
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))
    pos, weight = _sample_initial(rng, n, geom.depth, extent)
    rot = _rotation_lab_to_nv(geom.alpha)
    dt = tau / steps
    sigma = math.sqrt(2.0 * geom.diffusion * dt)
    g_prev = _couplings(pos, geom.depth, rot, constants)
    acc = 0.5 * g_prev
    path = [pos[:keep].copy()] if keep else None
    for k in range(steps):
        if sigma > 0:
            pos = pos + sigma * rng.standard_normal(pos.shape)
            pos[:, 2] = np.abs(pos[:, 2])  # reflect at the surface
        g_now = _couplings(pos, geom.depth, rot, constants)
        acc += g_now if k < steps - 1 else 0.5 * g_now
        if keep:
            path.append(pos[:keep].copy())
    big_g = acc * dt
    x1 = big_g * weight
    x2 = big_g * big_g * weight
    traj = None
    if keep:
        traj = (np.stack(path, axis=1), big_g[:keep].copy())
    return (x1.sum(), (x1 * x1).sum(), x2.sum(), (x2 * x2).sum(), n, traj)


def mc_diffusion_oracle(
    geom: SampleGeometry,
    tau: float,
    steps: int,
    n_particles: int,
    seed: int,
    extent: float | None = None,
    constants: PhysicalConstants = PhysicalConstants(),
    threads: int | None = None,
    keep_trajectories: int = 0,
) -> MonteCarloMoments:
    """Monte-Carlo estimate of <sum_j G_j> and <sum_j G_j^2> for diffusing nuclei.

    Initial positions fill the half-space above the surface up to a distance
    ``extent`` from the sensor (default 10^4 d) and are importance sampled.
    Each nucleus then performs a Gaussian random walk with reflection at the
    surface, and G_j is accumulated with the trapezoidal rule over ``steps``
    intervals. Particles are processed in fixed chunks, each with its own RNG
    stream derived from (seed, chunk index), so results do not depend on
    ``threads``.
    """
    if n_particles < 1000:
        raise ValueError("n_particles must be at least 1000")
    if steps < 1 or tau < 0:
        raise ValueError("need steps >= 1 and tau >= 0")
    extent = 1e4 * geom.depth if extent is None else float(extent)
    if extent < 10.0 * geom.depth:
        raise BoxTooSmall(f"extent {extent} < 10 d")
    if threads is None:
        threads = int(os.environ.get("NANONMR_THREADS", os.cpu_count() or 1))
    n_chunks = -(-n_particles // CHUNK)
    jobs = []
    for c in range(n_chunks):
        n = min(CHUNK, n_particles - c * CHUNK)
        keep = max(0, min(n, keep_trajectories - c * CHUNK))
        jobs.append((c, n, seed, geom, tau, steps, extent, constants, keep))
    if threads > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_chunk, jobs))
    else:
        results = [_run_chunk(j) for j in jobs]

    s1 = s1sq = s2 = s2sq = 0.0
    total = 0
    paths, gs = [], []
    for r1, r1sq, r2, r2sq, n, traj in results:
        s1 += r1
        s1sq += r1sq
        s2 += r2
        s2sq += r2sq
        total += n
        if traj is not None:
            paths.append(traj[0])
            gs.append(traj[1])
    dens = geom.density

    def mean_se(s, ssq):
        m = s / total
        var = max(ssq / total - m * m, 0.0) * total / (total - 1)
        return dens * m, dens * math.sqrt(var / total)

    m1, e1 = mean_se(s1, s1sq)
    m2, e2 = mean_se(s2, s2sq)
    trajectories = None
    if paths:
        trajectories = DiffusionTrajectory(np.concatenate(paths), np.concatenate(gs))
    return MonteCarloMoments(m1, e1, m2, e2, total, trajectories)


def truncated_second_moment_fraction(geom: SampleGeometry, extent: float,
                                     n_u: int = 200, n_phi: int = 256) -> float:
    """Fraction of sum_j g_j^2 contributed by nuclei farther than ``extent`` from the sensor.

    Computed in the lab frame by Gauss-Legendre quadrature in cos(theta_lab)
    and the trapezoid rule in azimuth, with the r^-4 radial integral done exactly.
    """
    x, w = np.polynomial.legendre.leggauss(n_u)
    u, wu = 0.5 * (x + 1.0), 0.5 * w
    azim = 2.0 * math.pi * np.arange(n_phi) / n_phi
    uu, pp = np.meshgrid(u, azim, indexing="ij")
    s = np.sqrt(1.0 - uu * uu)
    lab = np.stack([s * np.cos(pp), s * np.sin(pp), uu], axis=-1)
    nv = lab @ _rotation_lab_to_nv(geom.alpha).T
    ang = (-3.0 * nv[..., 2] * np.hypot(nv[..., 0], nv[..., 1])
           * np.cos(np.arctan2(nv[..., 1], nv[..., 0]))) ** 2
    d, big_r = geom.depth, extent
    full = (uu / d) ** 3 / 3.0
    inside = np.where(uu > d / big_r, full - big_r**-3 / 3.0, 0.0)
    wt = wu[:, None] * (2.0 * math.pi / n_phi)
    total = np.sum(ang * full * wt)
    return float(np.sum(ang * (full - inside) * wt) / total)
