"""MOT17-format sequence I/O: seqinfo.ini, det.txt, gt.txt and result files.

All parsers accept LF or CRLF input; writers emit LF. Real numbers are
serialized with six decimal places, which keeps parse/write round-trips
value-identical well within float precision.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass

from .errors import InvalidBox, MalformedRow, MalformedSeqInfo
from .geometry import Box, Detection, SequenceMeta, det_state_from_box


@dataclass(frozen=True)
class GtEntry:
    """One ground-truth row: identity, box, consider flag, class, visibility."""

    frame: int
    id: int
    box: Box
    flag: int
    cls: int
    visibility: float


@dataclass(frozen=True)
class ResultEntry:
    """One tracker-output row."""

    frame: int
    id: int
    box: Box
    conf: float


def parse_seqinfo(text: str) -> SequenceMeta:
    """Parse a seqinfo.ini [Sequence] section into SequenceMeta.

    Unknown keys are ignored; missing imWidth/imHeight/seqLength raise
    MalformedSeqInfo. frameRate defaults to 30 and name to "" when absent.
    """
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise MalformedSeqInfo(f"unparseable seqinfo: {e}") from e
    if not parser.has_section("Sequence"):
        raise MalformedSeqInfo("missing [Sequence] section")
    section = parser["Sequence"]
    values = {}
    for key in ("imWidth", "imHeight", "seqLength"):
        if key not in section:
            raise MalformedSeqInfo(f"missing key {key}")
        try:
            values[key] = int(section[key])
        except ValueError as e:
            raise MalformedSeqInfo(f"non-integer {key}={section[key]!r}") from e
    return SequenceMeta(
        name=section.get("name", ""),
        frame_count=values["seqLength"],
        image_width=values["imWidth"],
        image_height=values["imHeight"],
        frame_rate=float(section.get("frameRate", 30.0)),
    )


def _split_row(line: str, line_no: int, min_cols: int) -> list[float]:
    parts = line.split(",")
    if len(parts) < min_cols:
        raise MalformedRow(f"expected at least {min_cols} columns, got {len(parts)}", line_no)
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise MalformedRow(f"non-numeric field in {line!r}", line_no) from None


def _row_box(vals: list[float], line_no: int) -> Box:
    left, top, w, h = vals
    if w <= 0 or h <= 0:
        raise InvalidBox(f"non-positive box size {w}x{h}", line_no)
    return Box(left, top, w, h)


def parse_detections(text: str) -> list[Detection]:
    """Parse detection rows `frame,-1,left,top,w,h,conf,...`.

    Returns detections stable-sorted by frame (ties keep input order).
    """
    out = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        vals = _split_row(line, line_no, 7)
        box = _row_box(vals[2:6], line_no)
        frame = int(vals[0])
        if frame < 1:
            raise MalformedRow(f"frame must be >= 1, got {frame}", line_no)
        cx, cy, s, w = det_state_from_box(box)
        out.append(Detection(frame=frame, cx=cx, cy=cy, s=s, w=w, conf=vals[6]))
    out.sort(key=lambda d: d.frame)
    return out


def parse_ground_truth(text: str) -> list[GtEntry]:
    """Parse ground-truth rows `frame,id,left,top,w,h,flag,class,visibility`.

    Rows with flag=0 are retained (filtering is the evaluator's job).
    """
    out = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        vals = _split_row(line, line_no, 9)
        box = _row_box(vals[2:6], line_no)
        frame, oid = int(vals[0]), int(vals[1])
        if frame < 1 or oid < 1:
            raise MalformedRow(f"frame and id must be >= 1, got {frame},{oid}", line_no)
        if vals[6] not in (0.0, 1.0):
            raise MalformedRow(f"flag must be 0 or 1, got {vals[6]}", line_no)
        flag = int(vals[6])
        vis = vals[8]
        if not 0.0 <= vis <= 1.0:
            raise MalformedRow(f"visibility {vis} outside [0, 1]", line_no)
        out.append(GtEntry(frame=frame, id=oid, box=box, flag=flag, cls=int(vals[7]), visibility=vis))
    out.sort(key=lambda e: e.frame)
    return out


def parse_results(text: str) -> list[ResultEntry]:
    """Parse tracker-output rows `frame,id,left,top,w,h,conf,...`."""
    out = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        vals = _split_row(line, line_no, 7)
        box = _row_box(vals[2:6], line_no)
        frame, tid = int(vals[0]), int(vals[1])
        if frame < 1 or tid < 1:
            raise MalformedRow(f"frame and id must be >= 1, got {frame},{tid}", line_no)
        out.append(ResultEntry(frame=frame, id=tid, box=box, conf=vals[6]))
    out.sort(key=lambda e: e.frame)
    return out


def write_results(entries: list[ResultEntry]) -> str:
    """Serialize result entries, sorted by (frame, id), six decimals for reals."""
    rows = sorted(entries, key=lambda e: (e.frame, e.id))
    lines = [
        f"{e.frame},{e.id},{e.box.left:.6f},{e.box.top:.6f},"
        f"{e.box.width:.6f},{e.box.height:.6f},{e.conf:.6f},-1,-1,-1"
        for e in rows
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def write_ground_truth(entries: list[GtEntry]) -> str:
    """Serialize ground-truth entries, sorted by (frame, id)."""
    rows = sorted(entries, key=lambda e: (e.frame, e.id))
    lines = [
        f"{e.frame},{e.id},{e.box.left:.6f},{e.box.top:.6f},"
        f"{e.box.width:.6f},{e.box.height:.6f},{e.flag},{e.cls},{e.visibility:.6f}"
        for e in rows
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def write_detections(dets: list[Detection]) -> str:
    """Serialize detections in the det.txt layout, sorted by frame."""
    rows = sorted(dets, key=lambda d: d.frame)
    lines = []
    for d in rows:
        b = d.box
        lines.append(
            f"{d.frame},-1,{b.left:.6f},{b.top:.6f},{b.width:.6f},{b.height:.6f},{d.conf:.6f},-1,-1,-1"
        )
    return "\n".join(lines) + ("\n" if lines else "")


def write_seqinfo(meta: SequenceMeta) -> str:
    """Serialize SequenceMeta as a seqinfo.ini document."""
    return (
        "[Sequence]\n"
        f"name={meta.name}\n"
        f"imWidth={meta.image_width}\n"
        f"imHeight={meta.image_height}\n"
        f"seqLength={meta.frame_count}\n"
        f"frameRate={meta.frame_rate:g}\n"
    )
