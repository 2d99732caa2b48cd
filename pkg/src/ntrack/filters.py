"""Per-track state estimation.

Box centers are tracked by a particle filter whose prediction step is
driven by externally supplied flow velocities; box area and width follow
a constant-velocity Kalman filter. All operations are value-in/value-out
and deterministic: each particle operation clones the generator state it
received, so a given (seed, config, observation stream) always reproduces
the same filter states bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidConfig, InvalidMeasurement, InvalidVelocity


@dataclass(frozen=True)
class FilterConfig:
    """Noise model constants for both filters.

    Kalman noise is scale-relative: per-step process/measurement standard
    deviations are `scale * current magnitude` of the area and width
    components, so one config works across image resolutions.
    """

    n_particles: int = 100
    process_sigma: float = 5.0
    meas_sigma: float = 10.0
    resample_threshold: float = 0.5
    kalman_process_scale: float = 0.05
    kalman_meas_scale: float = 0.05

    def __post_init__(self):
        if self.n_particles < 1:
            raise InvalidConfig("n_particles must be >= 1")
        if self.process_sigma < 0 or self.meas_sigma <= 0:
            raise InvalidConfig("noise sigmas must be positive (process_sigma may be 0)")
        if not 0.0 < self.resample_threshold <= 1.0:
            raise InvalidConfig("resample_threshold must be in (0, 1]")
        if self.kalman_process_scale <= 0 or self.kalman_meas_scale <= 0:
            raise InvalidConfig("kalman noise scales must be positive")


@dataclass(frozen=True)
class ParticleSet:
    """Weighted particles for one box center plus the generator that drives them."""

    px: np.ndarray = field(repr=False)
    py: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    rng: np.random.Generator = field(repr=False)
    degenerate: bool = False

    def __len__(self) -> int:
        return self.px.shape[0]


def _clone_rng(rng: np.random.Generator) -> np.random.Generator:
    bg = type(rng.bit_generator)()
    bg.state = rng.bit_generator.state
    return np.random.Generator(bg)


def pf_init(center: tuple[float, float], cfg: FilterConfig, seed) -> ParticleSet:
    """Spawn particles from an isotropic Gaussian at `center`, uniform weights.

    `seed` may be anything np.random.default_rng accepts (int, SeedSequence, ...).
    """
    rng = np.random.default_rng(seed)
    n = cfg.n_particles
    cx, cy = center
    px = cx + rng.normal(0.0, cfg.process_sigma, n) if cfg.process_sigma > 0 else np.full(n, cx, dtype=float)
    py = cy + rng.normal(0.0, cfg.process_sigma, n) if cfg.process_sigma > 0 else np.full(n, cy, dtype=float)
    return ParticleSet(px=px, py=py, weights=np.full(n, 1.0 / n), rng=rng)


def pf_predict(ps: ParticleSet, velocity: tuple[float, float], cfg: FilterConfig) -> ParticleSet:
    """Shift every particle by `velocity` plus per-particle Gaussian jitter."""
    vx, vy = velocity
    if not (math.isfinite(vx) and math.isfinite(vy)):
        raise InvalidVelocity(f"non-finite velocity ({vx}, {vy})")
    rng = _clone_rng(ps.rng)
    n = len(ps)
    if cfg.process_sigma > 0:
        px = ps.px + vx + rng.normal(0.0, cfg.process_sigma, n)
        py = ps.py + vy + rng.normal(0.0, cfg.process_sigma, n)
    else:
        px = ps.px + vx
        py = ps.py + vy
    return ParticleSet(px=px, py=py, weights=ps.weights.copy(), rng=rng)


def pf_update(ps: ParticleSet, observation: tuple[float, float], cfg: FilterConfig) -> ParticleSet:
    """Reweight particles by a Gaussian likelihood of `observation`, then
    systematically resample when the effective sample size drops below
    `resample_threshold * N`.

    When every likelihood underflows to zero the weights are reset uniform
    and the returned set is flagged `degenerate`.
    """
    ox, oy = observation
    if not (math.isfinite(ox) and math.isfinite(oy)):
        raise InvalidVelocity(f"non-finite observation ({ox}, {oy})")
    rng = _clone_rng(ps.rng)
    d2 = (ps.px - ox) ** 2 + (ps.py - oy) ** 2
    w = ps.weights * np.exp(-d2 / (2.0 * cfg.meas_sigma**2))
    total = w.sum()
    n = len(ps)
    degenerate = False
    if total <= 0.0:
        w = np.full(n, 1.0 / n)
        degenerate = True
    else:
        w = w / total
    px, py = ps.px.copy(), ps.py.copy()
    ess = 1.0 / np.sum(w**2)
    if ess < cfg.resample_threshold * n:
        idx = _systematic_resample(w, rng)
        px, py = px[idx], py[idx]
        w = np.full(n, 1.0 / n)
    return ParticleSet(px=px, py=py, weights=w, rng=rng, degenerate=degenerate)


def _systematic_resample(weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = weights.shape[0]
    positions = (rng.random() + np.arange(n)) / n
    cumulative = np.cumsum(weights)
    cumulative[-1] = 1.0  # guard against float round-off at the tail
    return np.searchsorted(cumulative, positions)


def pf_estimate(ps: ParticleSet) -> tuple[float, float]:
    """Weight-weighted mean of the particle cloud."""
    return (float(np.dot(ps.weights, ps.px)), float(np.dot(ps.weights, ps.py)))


# --- constant-velocity Kalman filter on (area, width) ---

_F = np.array([
    [1.0, 0.0, 1.0, 0.0],
    [0.0, 1.0, 0.0, 1.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
])
_H = np.array([
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
])


@dataclass(frozen=True)
class KalmanSW:
    """State (s, w, ds, dw): box area, width and their per-frame velocities."""

    mean: np.ndarray = field(repr=False)
    cov: np.ndarray = field(repr=False)

    @property
    def s(self) -> float:
        return float(self.mean[0])

    @property
    def w(self) -> float:
        return float(self.mean[1])


def _noise_base(k: KalmanSW) -> tuple[float, float]:
    # keep noise scales meaningful even if the mean collapses toward zero
    return max(abs(float(k.mean[0])), 1.0), max(abs(float(k.mean[1])), 1.0)


def kf_init(s: float, w: float, cfg: FilterConfig) -> KalmanSW:
    """Start a size/width filter at a first measurement with zero velocities."""
    if s <= 0 or w <= 0:
        raise InvalidMeasurement(f"non-positive measurement s={s} w={w}")
    r = cfg.kalman_meas_scale
    mean = np.array([s, w, 0.0, 0.0])
    cov = np.diag([(2 * r * s) ** 2, (2 * r * w) ** 2, (r * s) ** 2, (r * w) ** 2])
    return KalmanSW(mean=mean, cov=cov)


def kf_predict(k: KalmanSW, cfg: FilterConfig) -> KalmanSW:
    """Advance one frame: s += ds, w += dw; covariance grows by process noise."""
    q = cfg.kalman_process_scale
    base_s, base_w = _noise_base(k)
    noise = np.diag([
        (q * base_s) ** 2, (q * base_w) ** 2,
        (0.5 * q * base_s) ** 2, (0.5 * q * base_w) ** 2,
    ])
    mean = _F @ k.mean
    cov = _F @ k.cov @ _F.T + noise
    return KalmanSW(mean=mean, cov=cov)


def kf_update(k: KalmanSW, measurement: tuple[float, float], cfg: FilterConfig) -> KalmanSW:
    """Standard linear-Gaussian update observing (s, w); Joseph-form covariance."""
    s, w = measurement
    if s <= 0 or w <= 0:
        raise InvalidMeasurement(f"non-positive measurement s={s} w={w}")
    r = cfg.kalman_meas_scale
    meas_noise = np.diag([(r * s) ** 2, (r * w) ** 2])
    z = np.array([s, w])
    innovation = z - _H @ k.mean
    S = _H @ k.cov @ _H.T + meas_noise
    gain = k.cov @ _H.T @ np.linalg.inv(S)
    mean = k.mean + gain @ innovation
    ikh = np.eye(4) - gain @ _H
    cov = ikh @ k.cov @ ikh.T + gain @ meas_noise @ gain.T
    cov = (cov + cov.T) / 2.0
    return KalmanSW(mean=mean, cov=cov)


def kf_clone(k: KalmanSW) -> KalmanSW:
    return replace(k, mean=k.mean.copy(), cov=k.cov.copy())
