"""Track-detection association: IoU costs, assignment solving, two stages.

The per-frame matching follows the ByteTrack-style split: high-confidence
detections are matched against every live track first, then the remaining
low-confidence detections get a second chance against the tracks stage 1
left unmatched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InvalidConfig
from .geometry import Box, iou


@dataclass(frozen=True)
class AssocConfig:
    conf_high: float = 0.6
    iou_min_stage1: float = 0.2
    iou_min_stage2: float = 0.4
    conf_init: float = 0.7

    def __post_init__(self):
        for name, v in (("iou_min_stage1", self.iou_min_stage1), ("iou_min_stage2", self.iou_min_stage2)):
            if not 0.0 < v < 1.0:
                raise InvalidConfig(f"{name} must be in (0, 1), got {v}")


@dataclass(frozen=True)
class AssocResult:
    """Partition of one frame's tracks and detections.

    `matches` pairs a track id with an index into the frame's detection
    list; `dormant_tracks` are the unmatched track ids and
    `unmatched_detections` the unmatched detection indices.
    """

    matches: list[tuple[int, int]]
    dormant_tracks: list[int]
    unmatched_detections: list[int]


def cost_matrix(predicted_boxes: list[Box], detection_boxes: list[Box]) -> np.ndarray:
    """Entry (i, j) = 1 - IoU(track box i, detection box j)."""
    out = np.ones((len(predicted_boxes), len(detection_boxes)))
    for i, a in enumerate(predicted_boxes):
        for j, b in enumerate(detection_boxes):
            out[i, j] = 1.0 - iou(a, b)
    return out


def solve_assignment(cost: np.ndarray, max_cost: float
                     ) -> tuple[list[tuple[int, int]], list[int], list[int]]:
    """Minimum-total-cost one-to-one assignment with post-hoc rejection.

    Assigned pairs whose cost exceeds `max_cost` are rejected and reported
    unmatched. Ties between equally optimal assignments are broken toward
    the lowest (row, col) lexicographic order via an epsilon perturbation
    that is far below any meaningful IoU difference.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.size == 0:
        n, m = cost.shape if cost.ndim == 2 else (0, 0)
        return [], list(range(n)), list(range(m))
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost matrix must be finite")
    n, m = cost.shape
    tiebreak = np.arange(n * m, dtype=float).reshape(n, m) * (1e-12 / (n * m))
    rows, cols = linear_sum_assignment(cost + tiebreak)
    matches, unmatched_rows, unmatched_cols = [], [], []
    matched_r, matched_c = set(), set()
    for r, c in zip(rows, cols):
        if cost[r, c] <= max_cost:
            matches.append((int(r), int(c)))
            matched_r.add(int(r))
            matched_c.add(int(c))
    unmatched_rows = [i for i in range(n) if i not in matched_r]
    unmatched_cols = [j for j in range(m) if j not in matched_c]
    matches.sort()
    return matches, unmatched_rows, unmatched_cols


def associate_two_stage(track_ids: list[int], predicted_boxes: list[Box],
                        detection_boxes: list[Box], confidences: list[float],
                        cfg: AssocConfig) -> AssocResult:
    """Two-stage association of predicted track boxes to one frame's detections.

    Stage 1 matches detections with conf >= conf_high against all tracks,
    accepting IoU >= iou_min_stage1. Stage 2 matches the remaining
    (low-confidence) detections against the tracks stage 1 left unmatched,
    accepting IoU >= iou_min_stage2.
    """
    high = [j for j, c in enumerate(confidences) if c >= cfg.conf_high]
    low = [j for j, c in enumerate(confidences) if c < cfg.conf_high]

    matches: list[tuple[int, int]] = []
    matched_dets: set[int] = set()

    c1 = cost_matrix(predicted_boxes, [detection_boxes[j] for j in high])
    m1, u1_tracks, _ = solve_assignment(c1, 1.0 - cfg.iou_min_stage1)
    for ti, dj in m1:
        matches.append((track_ids[ti], high[dj]))
        matched_dets.add(high[dj])

    remaining_tracks = u1_tracks
    c2 = cost_matrix([predicted_boxes[i] for i in remaining_tracks],
                     [detection_boxes[j] for j in low])
    m2, u2_tracks, _ = solve_assignment(c2, 1.0 - cfg.iou_min_stage2)
    for ti, dj in m2:
        matches.append((track_ids[remaining_tracks[ti]], low[dj]))
        matched_dets.add(low[dj])

    dormant = sorted(set(track_ids) - {tid for tid, _ in matches})
    unmatched = [j for j in range(len(detection_boxes)) if j not in matched_dets]
    return AssocResult(matches=sorted(matches), dormant_tracks=dormant,
                       unmatched_detections=unmatched)
