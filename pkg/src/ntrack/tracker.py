"""Frame-by-frame tracking: predict, associate, update, initialize, refine.

One SequenceTracker instance is a sequential state machine over a single
sequence. Each step: (1) every live track advances its particle filter by
the flow velocity sampled at its current estimate and its size/width
Kalman filter by one frame; (2) predicted boxes are associated with the
frame's detections in two confidence stages; (3) matched tracks update
from their detection; (4) unmatched (dormant) tracks update from a fused
neighbor-based proxy when one is available; (5) leftover high-confidence
detections start new tracks; (6) long-dormant and out-of-frame tracks are
removed; (7) active tracks record their nearest neighbors; (8) confirmed
active tracks are emitted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .assoc import AssocConfig, associate_two_stage
from .errors import InvalidConfig, InvalidFlow, SequenceError
from .filters import (FilterConfig, KalmanSW, ParticleSet, kf_init, kf_predict,
                      kf_update, pf_estimate, pf_init, pf_predict, pf_update)
from .flow import FlowField, FlowProvider, sample_box_velocity
from .geometry import Box, Detection, SequenceMeta, box_from_det_state
from .motio import ResultEntry
from .rla import NeighborHistories, record_neighbors, rla_estimate

# floors applied when materializing a box from drifting filter state
_MIN_AREA = 1.0
_MIN_WIDTH = 1.0


class TrackStatus(Enum):
    ACTIVE = "active"
    DORMANT = "dormant"
    REMOVED = "removed"


@dataclass
class Track:
    id: int
    particles: ParticleSet
    kalman: KalmanSW
    status: TrackStatus
    born: int
    last_matched: int
    hits: int = 1
    frames_dormant: int = 0
    last_conf: float = 0.0

    def estimate(self) -> tuple[float, float]:
        return pf_estimate(self.particles)

    def box(self) -> Box:
        cx, cy = self.estimate()
        s = max(self.kalman.s, _MIN_AREA)
        w = max(self.kalman.w, _MIN_WIDTH)
        return box_from_det_state(cx, cy, s, w)


@dataclass(frozen=True)
class TrackerConfig:
    filter: FilterConfig = field(default_factory=FilterConfig)
    assoc: AssocConfig = field(default_factory=AssocConfig)
    rla_enabled: bool = True
    rla_neighbors: int = 3
    rla_min_samples: int = 3
    rla_var_floor: float = 1.0
    rla_history_max: int = 300
    dormant_max: int = 100
    confirm_hits: int = 2
    border_slack: float = 0.0

    def __post_init__(self):
        if self.dormant_max < 1:
            raise InvalidConfig("dormant_max must be >= 1")
        if self.confirm_hits < 1:
            raise InvalidConfig("confirm_hits must be >= 1")
        if self.rla_neighbors < 1:
            raise InvalidConfig("rla_neighbors must be >= 1")
        if self.rla_min_samples < 2:
            raise InvalidConfig("rla_min_samples must be >= 2 (a line needs two points)")


@dataclass(frozen=True)
class TrackingResult:
    """Confirmed per-frame output rows plus the distinct confirmed-id count."""

    entries: list[ResultEntry]
    unique_count: int


@dataclass(frozen=True)
class SequenceData:
    """Everything the tracker consumes for one sequence."""

    meta: SequenceMeta
    detections: list[Detection]
    flow: FlowProvider | None = None

    def by_frame(self) -> dict[int, list[Detection]]:
        grouped: dict[int, list[Detection]] = {}
        for d in self.detections:
            grouped.setdefault(d.frame, []).append(d)
        return grouped


def refine(tracks: list[Track], meta: SequenceMeta, dormant_max: int,
           border_slack: float = 0.0) -> list[Track]:
    """Drop tracks dormant for dormant_max frames or centered out of frame."""
    kept = []
    for t in tracks:
        if t.frames_dormant >= dormant_max:
            t.status = TrackStatus.REMOVED
            continue
        cx, cy = t.estimate()
        if (cx < -border_slack or cx > meta.image_width + border_slack
                or cy < -border_slack or cy > meta.image_height + border_slack):
            t.status = TrackStatus.REMOVED
            continue
        kept.append(t)
    return kept


class SequenceTracker:
    """Stateful tracker for one sequence; call step() with increasing frames."""

    def __init__(self, meta: SequenceMeta, cfg: TrackerConfig | None = None, seed: int = 0):
        self.meta = meta
        self.cfg = cfg if cfg is not None else TrackerConfig()
        self.seed = seed
        self.tracks: list[Track] = []
        self.histories = NeighborHistories(self.cfg.rla_history_max)
        self.confirmed_ids: set[int] = set()
        self._next_id = 1
        self._last_frame = 0

    @property
    def unique_count(self) -> int:
        return len(self.confirmed_ids)

    def _spawn(self, det: Detection, frame: int) -> Track:
        tid = self._next_id
        self._next_id += 1
        seed_seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(tid,))
        track = Track(
            id=tid,
            particles=pf_init((det.cx, det.cy), self.cfg.filter, seed_seq),
            kalman=kf_init(det.s, det.w, self.cfg.filter),
            status=TrackStatus.ACTIVE,
            born=frame,
            last_matched=frame,
            last_conf=det.conf,
        )
        self.tracks.append(track)
        return track

    def step(self, frame: int, flow_field: FlowField | None,
             detections: list[Detection]) -> list[ResultEntry]:
        cfg = self.cfg
        if frame <= self._last_frame:
            raise SequenceError(f"frame {frame} not after {self._last_frame}")
        self._last_frame = frame
        if flow_field is not None and (flow_field.width, flow_field.height) != (
                self.meta.image_width, self.meta.image_height):
            raise InvalidFlow(
                f"flow {flow_field.width}x{flow_field.height} does not match "
                f"sequence {self.meta.image_width}x{self.meta.image_height}")

        # (1) flow-driven prediction, one shared velocity per track
        for t in self.tracks:
            if flow_field is None:
                velocity = (0.0, 0.0)
            else:
                velocity = sample_box_velocity(flow_field, *t.estimate())
            t.particles = pf_predict(t.particles, velocity, cfg.filter)
            t.kalman = kf_predict(t.kalman, cfg.filter)

        # (2) two-stage association on predicted boxes
        result = associate_two_stage(
            [t.id for t in self.tracks],
            [t.box() for t in self.tracks],
            [d.box for d in detections],
            [d.conf for d in detections],
            cfg.assoc,
        )
        by_id = {t.id: t for t in self.tracks}

        # (3) matched tracks update from their detection
        for tid, dj in result.matches:
            t, d = by_id[tid], detections[dj]
            t.particles = pf_update(t.particles, (d.cx, d.cy), cfg.filter)
            t.kalman = kf_update(t.kalman, (d.s, d.w), cfg.filter)
            t.status = TrackStatus.ACTIVE
            t.frames_dormant = 0
            t.hits += 1
            t.last_matched = frame
            t.last_conf = d.conf

        # (4) dormant tracks update from a neighbor proxy when available
        active_estimates = {tid: by_id[tid].estimate() for tid, _ in result.matches}
        for tid in result.dormant_tracks:
            t = by_id[tid]
            if cfg.rla_enabled:
                proxy = rla_estimate(self.histories, tid, frame, active_estimates,
                                     cfg.rla_neighbors, cfg.rla_min_samples,
                                     cfg.rla_var_floor)
                if proxy is not None:
                    t.particles = pf_update(t.particles, (proxy.cx, proxy.cy), cfg.filter)
            t.status = TrackStatus.DORMANT
            t.frames_dormant += 1

        # (5) leftover stage-1 detections above the init threshold start tracks
        for dj in result.unmatched_detections:
            d = detections[dj]
            if d.conf >= cfg.assoc.conf_high and d.conf >= cfg.assoc.conf_init:
                self._spawn(d, frame)

        # (6) refine; removed tracks also release their pair histories
        kept = refine(self.tracks, self.meta, cfg.dormant_max, cfg.border_slack)
        for t in self.tracks:
            if t.status is TrackStatus.REMOVED:
                self.histories.drop_track(t.id)
        self.tracks = kept

        # (7) active tracks record their nearest neighbors for later proxies
        record_neighbors(
            self.histories,
            {t.id: t.estimate() for t in self.tracks if t.status is TrackStatus.ACTIVE},
            frame,
            cfg.rla_neighbors,
        )

        # (8) emit confirmed active tracks
        rows = []
        for t in self.tracks:
            if t.status is TrackStatus.ACTIVE and t.hits >= cfg.confirm_hits:
                self.confirmed_ids.add(t.id)
                rows.append(ResultEntry(frame=frame, id=t.id, box=t.box(), conf=t.last_conf))
        rows.sort(key=lambda r: r.id)
        return rows


def run_sequence(meta: SequenceMeta, flow_provider: FlowProvider | None,
                 detections, cfg: TrackerConfig | None = None,
                 seed: int = 0) -> TrackingResult:
    """Fold the tracker over all frames of a sequence.

    `detections` may be a flat Detection list or a {frame: [Detection]} dict.
    Frame 1 never consumes flow; later frames fall back to identity motion
    when the provider has no field for them.
    """
    if isinstance(detections, dict):
        by_frame = detections
    else:
        by_frame = SequenceData(meta, list(detections)).by_frame()
    tracker = SequenceTracker(meta, cfg, seed)
    entries: list[ResultEntry] = []
    for frame in range(1, meta.frame_count + 1):
        flow_field = None
        if flow_provider is not None and frame > 1:
            flow_field = flow_provider.get(frame)
        entries.extend(tracker.step(frame, flow_field, by_frame.get(frame, [])))
    return TrackingResult(entries=entries, unique_count=tracker.unique_count)
