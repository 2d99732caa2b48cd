"""Counting-error and tracking-quality evaluation.

Counting quality is measured by the mean absolute percentage error and the
root-mean-square error over per-sequence (ground truth, hypothesis) count
pairs. Tracking quality follows the CLEAR conventions (MOTA/MOTP/IDsw/Frag
with match persistence) plus the identity-aware IDP/IDR/IDF1 family
computed through a global trajectory bipartite matching. A one-sided
paired t-test compares per-sequence counting errors of two methods.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import stdtr

from .assoc import solve_assignment
from .errors import DegenerateSample, EmptyInput, InsufficientData, InvalidMargin
from .geometry import SequenceMeta, iou
from .motio import GtEntry, ResultEntry


@dataclass(frozen=True)
class CountPair:
    """Per-sequence ground-truth and hypothesis unique-object counts."""

    gt: int
    hyp: int

    def __post_init__(self):
        if self.gt < 1:
            raise ValueError(f"ground-truth count must be >= 1, got {self.gt}")


def mape(pairs: list[CountPair]) -> float:
    """Mean absolute percentage error: mean of |gt - hyp| / gt."""
    if not pairs:
        raise EmptyInput("no count pairs")
    return sum(abs(p.gt - p.hyp) / p.gt for p in pairs) / len(pairs)


def rmse(pairs: list[CountPair]) -> float:
    """Root mean square counting error: sqrt(mean of (gt - hyp)^2)."""
    if not pairs:
        raise EmptyInput("no count pairs")
    return math.sqrt(sum((p.gt - p.hyp) ** 2 for p in pairs) / len(pairs))


def filter_margin(entries, meta: SequenceMeta, margin: float = 200.0):
    """Drop boxes overlapping the left or right frame margin band.

    A box survives only if it lies fully inside [margin, width - margin]
    along x (boundary-inclusive). Applies to the x axis only.
    """
    if margin >= meta.image_width / 2:
        raise InvalidMargin(f"margin {margin} leaves no interior on width {meta.image_width}")
    lo, hi = margin, meta.image_width - margin
    return [e for e in entries if e.box.left >= lo and e.box.right <= hi]


@dataclass(frozen=True)
class MetricsReport:
    mota: float
    motp: float
    idp: float
    idr: float
    idf1: float
    idsw: int
    frag: int
    matches: int
    misses: int
    false_positives: int
    num_gt: int
    num_hyp: int
    idtp: int
    iou_total: float

    def as_dict(self) -> dict:
        return asdict(self)


def clear_and_id_metrics(gt_entries: list[GtEntry], result_entries: list[ResultEntry],
                         iou_match_min: float = 0.5) -> MetricsReport:
    """CLEAR and identity metrics for one sequence.

    Ground-truth rows with flag=0 are excluded. Per-frame matching keeps
    the previous frame's correspondence whenever it is still above the IoU
    threshold, then resolves the rest by minimum-cost assignment; an
    identity switch is counted whenever a ground-truth object's matched
    hypothesis id changes.
    """
    gt = [e for e in gt_entries if e.flag == 1]
    frames = sorted({e.frame for e in gt} | {e.frame for e in result_entries})
    gt_by_frame: dict[int, list[GtEntry]] = {}
    for e in gt:
        gt_by_frame.setdefault(e.frame, []).append(e)
    hyp_by_frame: dict[int, list[ResultEntry]] = {}
    for e in result_entries:
        hyp_by_frame.setdefault(e.frame, []).append(e)

    prev_match: dict[int, int] = {}
    matched_flags: dict[int, list[bool]] = {}
    n_matches = 0
    misses = 0
    false_positives = 0
    idsw = 0
    iou_total = 0.0

    for f in frames:
        G = sorted(gt_by_frame.get(f, []), key=lambda e: e.id)
        H = sorted(hyp_by_frame.get(f, []), key=lambda e: e.id)
        h_by_id = {h.id: h for h in H}
        assigned: dict[int, int] = {}
        used_h: set[int] = set()

        # keep surviving correspondences from earlier frames
        for g in G:
            h_id = prev_match.get(g.id)
            if h_id is None or h_id in used_h or h_id not in h_by_id:
                continue
            overlap = iou(g.box, h_by_id[h_id].box)
            if overlap >= iou_match_min:
                assigned[g.id] = h_id
                used_h.add(h_id)
                iou_total += overlap

        # assign the remainder by minimum cost
        rest_g = [g for g in G if g.id not in assigned]
        rest_h = [h for h in H if h.id not in used_h]
        if rest_g and rest_h:
            cost = np.ones((len(rest_g), len(rest_h)))
            for i, g in enumerate(rest_g):
                for j, h in enumerate(rest_h):
                    cost[i, j] = 1.0 - iou(g.box, h.box)
            pairs, _, _ = solve_assignment(cost, 1.0 - iou_match_min)
            for i, j in pairs:
                g, h = rest_g[i], rest_h[j]
                if g.id in prev_match and prev_match[g.id] != h.id:
                    idsw += 1
                assigned[g.id] = h.id
                used_h.add(h.id)
                iou_total += 1.0 - cost[i, j]

        prev_match.update(assigned)
        n_matches += len(assigned)
        misses += len(G) - len(assigned)
        false_positives += len(H) - len(assigned)
        for g in G:
            matched_flags.setdefault(g.id, []).append(g.id in assigned)

    num_gt = len(gt)
    num_hyp = len(result_entries)
    mota = 1.0 - (misses + false_positives + idsw) / num_gt if num_gt else 0.0
    motp = iou_total / n_matches if n_matches else 0.0

    frag = 0
    for flags in matched_flags.values():
        seen = False
        in_gap = False
        for ok in flags:
            if ok:
                if seen and in_gap:
                    frag += 1
                seen = True
                in_gap = False
            elif seen:
                in_gap = True

    idtp = _identity_true_positives(gt_by_frame, hyp_by_frame, frames, iou_match_min)
    idp = idtp / num_hyp if num_hyp else 0.0
    idr = idtp / num_gt if num_gt else 0.0
    idf1 = 2.0 * idtp / (num_gt + num_hyp) if (num_gt + num_hyp) else 0.0

    return MetricsReport(
        mota=mota, motp=motp, idp=idp, idr=idr, idf1=idf1,
        idsw=idsw, frag=frag, matches=n_matches, misses=misses,
        false_positives=false_positives, num_gt=num_gt, num_hyp=num_hyp,
        idtp=idtp, iou_total=iou_total,
    )


def _identity_true_positives(gt_by_frame, hyp_by_frame, frames, iou_match_min) -> int:
    """IDTP via the global truth-to-result trajectory assignment."""
    gt_ids = sorted({e.id for rows in gt_by_frame.values() for e in rows})
    hyp_ids = sorted({e.id for rows in hyp_by_frame.values() for e in rows})
    if not gt_ids or not hyp_ids:
        return 0
    g_index = {g: i for i, g in enumerate(gt_ids)}
    h_index = {h: j for j, h in enumerate(hyp_ids)}
    g_len = np.zeros(len(gt_ids), dtype=int)
    h_len = np.zeros(len(hyp_ids), dtype=int)
    overlap = np.zeros((len(gt_ids), len(hyp_ids)), dtype=int)
    for f in frames:
        for g in gt_by_frame.get(f, []):
            g_len[g_index[g.id]] += 1
        for h in hyp_by_frame.get(f, []):
            h_len[h_index[h.id]] += 1
        for g in gt_by_frame.get(f, []):
            for h in hyp_by_frame.get(f, []):
                if iou(g.box, h.box) >= iou_match_min:
                    overlap[g_index[g.id], h_index[h.id]] += 1

    ng, nh = len(gt_ids), len(hyp_ids)
    big = float(g_len.sum() + h_len.sum() + 1)
    size = ng + nh
    cost = np.full((size, size), 0.0)
    cost[:ng, :nh] = (g_len[:, None] - overlap) + (h_len[None, :] - overlap)
    cost[:ng, nh:] = big
    cost[np.arange(ng), nh + np.arange(ng)] = g_len
    cost[ng:, :nh] = big
    cost[ng + np.arange(nh), np.arange(nh)] = h_len
    pairs, _, _ = solve_assignment(cost, float("inf"))
    idtp = 0
    for r, c in pairs:
        if r < ng and c < nh:
            idtp += int(overlap[r, c])
    return idtp


def paired_t_test_one_sided(errors_a: list[float], errors_b: list[float]
                            ) -> tuple[float, float]:
    """One-sided paired t-test of whether mean(errors_a) < mean(errors_b).

    Differences d = b - a; t = mean(d) / (sd(d) / sqrt(n)) with the sample
    (n-1) standard deviation; the p-value is the upper Student-t tail with
    n-1 degrees of freedom. Small p rejects "a's mean error is >= b's".
    """
    if len(errors_a) != len(errors_b):
        raise ValueError(f"length mismatch: {len(errors_a)} vs {len(errors_b)}")
    n = len(errors_a)
    if n < 2:
        raise InsufficientData(f"need at least 2 paired samples, got {n}")
    d = [b - a for a, b in zip(errors_a, errors_b)]
    mean = sum(d) / n
    var = sum((x - mean) ** 2 for x in d) / (n - 1)
    if var == 0.0:
        raise DegenerateSample("all paired differences are identical")
    t = mean / math.sqrt(var / n)
    p = float(stdtr(n - 1, -t))  # upper tail by symmetry
    return t, p


def format_report(report: MetricsReport) -> str:
    """Flat key=value text block, one metric per line."""
    d = report.as_dict()
    lines = []
    for key in ("mota", "motp", "idp", "idr", "idf1"):
        lines.append(f"{key.upper()}={d[key]:.6f}")
    for key in ("idsw", "frag", "matches", "misses", "false_positives", "num_gt", "num_hyp"):
        lines.append(f"{key.upper()}={d[key]}")
    return "\n".join(lines) + "\n"


def aggregate_reports(reports: list[MetricsReport]) -> MetricsReport:
    """Combine per-sequence reports by summing counts and re-deriving ratios."""
    if not reports:
        raise EmptyInput("no reports to aggregate")
    idsw = sum(r.idsw for r in reports)
    frag = sum(r.frag for r in reports)
    matches = sum(r.matches for r in reports)
    misses = sum(r.misses for r in reports)
    fp = sum(r.false_positives for r in reports)
    num_gt = sum(r.num_gt for r in reports)
    num_hyp = sum(r.num_hyp for r in reports)
    idtp = sum(r.idtp for r in reports)
    iou_total = sum(r.iou_total for r in reports)
    return MetricsReport(
        mota=1.0 - (misses + fp + idsw) / num_gt if num_gt else 0.0,
        motp=iou_total / matches if matches else 0.0,
        idp=idtp / num_hyp if num_hyp else 0.0,
        idr=idtp / num_gt if num_gt else 0.0,
        idf1=2.0 * idtp / (num_gt + num_hyp) if (num_gt + num_hyp) else 0.0,
        idsw=idsw, frag=frag, matches=matches, misses=misses,
        false_positives=fp, num_gt=num_gt, num_hyp=num_hyp,
        idtp=idtp, iou_total=iou_total,
    )
