"""Relative-location analysis for dormant tracks.

While two tracks are simultaneously active, their per-axis locations are
recorded as paired samples. When a track later goes unmatched, each
recorded neighbor that is still active yields a location estimate through
a per-axis linear model fitted on that shared history; the per-neighbor
Gaussians are fused precision-weighted into a single proxy observation.
The x and y axes are treated as independent throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateRegressor, InsufficientHistory, NoEstimates

_SXX_EPS = 1e-12


@dataclass(frozen=True)
class PairSample:
    """One co-active observation on a single axis."""

    frame: int
    neighbor_loc: float
    target_loc: float


@dataclass(frozen=True)
class Gaussian1D:
    mu: float
    var: float


@dataclass(frozen=True)
class PairModel:
    """Least-squares line target_loc = c0 + c1 * neighbor_loc with residual variance."""

    c0: float
    c1: float
    var: float
    m: int


@dataclass(frozen=True)
class RlaProxy:
    """Fused proxy observation for a dormant track's box center."""

    cx: float
    cy: float
    x: Gaussian1D
    y: Gaussian1D


class PairHistory:
    """Bounded co-active sample store for one ordered (target, neighbor) pair.

    The x and y axes share one strictly increasing frame list.
    """

    __slots__ = ("frames", "nx", "tx", "ny", "ty", "max_samples")

    def __init__(self, max_samples: int = 300):
        self.frames: list[int] = []
        self.nx: list[float] = []
        self.tx: list[float] = []
        self.ny: list[float] = []
        self.ty: list[float] = []
        self.max_samples = max_samples

    def append(self, frame: int, neighbor: tuple[float, float], target: tuple[float, float]):
        if self.frames and frame <= self.frames[-1]:
            raise ValueError(f"frames must be strictly increasing, got {frame} after {self.frames[-1]}")
        self.frames.append(frame)
        self.nx.append(neighbor[0])
        self.tx.append(target[0])
        self.ny.append(neighbor[1])
        self.ty.append(target[1])
        if len(self.frames) > self.max_samples:
            del self.frames[0], self.nx[0], self.tx[0], self.ny[0], self.ty[0]

    def __len__(self) -> int:
        return len(self.frames)

    def samples(self, axis: str) -> list[PairSample]:
        if axis == "x":
            n, t = self.nx, self.tx
        elif axis == "y":
            n, t = self.ny, self.ty
        else:
            raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
        return [PairSample(f, nl, tl) for f, nl, tl in zip(self.frames, n, t)]


class NeighborHistories:
    """All pair histories of one tracker instance, keyed by (target, neighbor)."""

    def __init__(self, max_samples: int = 300):
        self._pairs: dict[tuple[int, int], PairHistory] = {}
        self.max_samples = max_samples

    def pair(self, target: int, neighbor: int) -> PairHistory | None:
        return self._pairs.get((target, neighbor))

    def neighbors_of(self, target: int) -> list[int]:
        return [j for (i, j) in self._pairs if i == target]

    def _get_or_create(self, target: int, neighbor: int) -> PairHistory:
        key = (target, neighbor)
        hist = self._pairs.get(key)
        if hist is None:
            hist = self._pairs[key] = PairHistory(self.max_samples)
        return hist

    def drop_track(self, track_id: int) -> None:
        """Forget every pair involving a removed track."""
        self._pairs = {k: v for k, v in self._pairs.items()
                       if k[0] != track_id and k[1] != track_id}


def record_neighbors(histories: NeighborHistories,
                     active_estimates: dict[int, tuple[float, float]],
                     frame: int, k: int) -> None:
    """Record each active track's k nearest active neighbors at this frame.

    Distances are Euclidean between box centers; with fewer than k other
    active tracks every one of them is recorded.
    """
    ids = sorted(active_estimates)
    for i in ids:
        cx, cy = active_estimates[i]
        others = []
        for j in ids:
            if j == i:
                continue
            ox, oy = active_estimates[j]
            others.append(((ox - cx) ** 2 + (oy - cy) ** 2, j))
        others.sort()
        for _, j in others[:k]:
            histories._get_or_create(i, j).append(frame, active_estimates[j], active_estimates[i])


def rank_neighbors(histories: NeighborHistories, target: int, frame: int) -> list[int]:
    """Recorded neighbors of `target` ordered by descending rank.

    A neighbor's rank is the sum of the frame indices (before `frame`) in
    which it was recorded as co-active with the target, so recent shared
    history dominates. Ties favor more co-active frames, then the smaller
    track id.
    """
    scored = []
    for j in histories.neighbors_of(target):
        hist = histories.pair(target, j)
        frames = [f for f in hist.frames if f < frame]
        scored.append((-sum(frames), -len(frames), j))
    scored.sort()
    return [j for _, _, j in scored]


def fit_pair_model(samples: list[PairSample], m_min: int = 3) -> PairModel:
    """Least-squares fit of target location on neighbor location.

    The residual variance uses the 1/m convention (not 1/(m-2)).
    """
    m = len(samples)
    if m < m_min:
        raise InsufficientHistory(f"need at least {m_min} samples, got {m}")
    xs = [s.neighbor_loc for s in samples]
    ys = [s.target_loc for s in samples]
    xb = sum(xs) / m
    yb = sum(ys) / m
    sxx = sum((x - xb) ** 2 for x in xs)
    if sxx <= _SXX_EPS:
        raise DegenerateRegressor(f"neighbor locations (nearly) constant, sxx={sxx}")
    sxy = sum((x - xb) * (y - yb) for x, y in zip(xs, ys))
    c1 = sxy / sxx
    c0 = yb - c1 * xb
    ssr = sum((y - (c0 + c1 * x)) ** 2 for x, y in zip(xs, ys))
    return PairModel(c0=c0, c1=c1, var=ssr / m, m=m)


def estimate_from_neighbor(model: PairModel, neighbor_loc: float,
                           var_floor: float = 1.0) -> Gaussian1D:
    """Evaluate the pair model at the neighbor's current location.

    The variance is clamped from below so an exact-line history never
    produces a zero-variance (infinitely trusted) estimate.
    """
    if not math.isfinite(neighbor_loc):
        raise ValueError(f"non-finite neighbor location {neighbor_loc}")
    return Gaussian1D(mu=model.c0 + model.c1 * neighbor_loc, var=max(model.var, var_floor))


def fuse_estimates(estimates: list[Gaussian1D]) -> Gaussian1D:
    """Precision-weighted product of Gaussians: fused precision is the sum of
    input precisions and the mean is the precision-weighted average."""
    if not estimates:
        raise NoEstimates("cannot fuse an empty estimate list")
    precision = sum(1.0 / g.var for g in estimates)
    var = 1.0 / precision
    mu = var * sum(g.mu / g.var for g in estimates)
    return Gaussian1D(mu=mu, var=var)


def rla_estimate(histories: NeighborHistories, target: int, frame: int,
                 active_estimates: dict[int, tuple[float, float]],
                 k: int = 3, m_min: int = 3, var_floor: float = 1.0) -> RlaProxy | None:
    """Proxy center for a dormant track from its best co-active neighbors.

    Takes the top-k ranked neighbors that are currently active and have at
    least m_min co-active samples, then fits/evaluates/fuses per axis.
    Returns None when no neighbor qualifies on either axis; callers fall
    back to flow-only prediction.
    """
    ranked = rank_neighbors(histories, target, frame)
    selected = []
    for j in ranked:
        if j not in active_estimates:
            continue
        if len(histories.pair(target, j)) < m_min:
            continue
        selected.append(j)
        if len(selected) == k:
            break
    if not selected:
        return None

    fused: dict[str, Gaussian1D] = {}
    for axis in ("x", "y"):
        contributions = []
        for j in selected:
            hist = histories.pair(target, j)
            try:
                model = fit_pair_model(hist.samples(axis), m_min)
            except DegenerateRegressor:
                continue
            loc = active_estimates[j][0 if axis == "x" else 1]
            contributions.append(estimate_from_neighbor(model, loc, var_floor))
        if not contributions:
            return None
        fused[axis] = fuse_estimates(contributions)
    return RlaProxy(cx=fused["x"].mu, cy=fused["y"].mu, x=fused["x"], y=fused["y"])
