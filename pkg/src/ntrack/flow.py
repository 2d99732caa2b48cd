"""Dense optical-flow fields: .flo file I/O, box-velocity sampling, synthesis.

A FlowField holds per-pixel displacements for one frame transition
(frame l-1 into frame l), in pixels per frame. Fields are consumed from
Middlebury .flo files or synthesized; this package never computes flow
from imagery.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np

from .errors import CorruptFlow, InvalidVelocity, NotAFlowFile, OutOfField, TruncatedFlow
from .geometry import Box

FLO_MAGIC = 202021.25  # float32 little-endian bytes spell "PIEH"


@dataclass(frozen=True)
class FlowField:
    """Per-pixel displacement grids u (horizontal) and v (vertical), row-major."""

    width: int
    height: int
    u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name, grid in (("u", self.u), ("v", self.v)):
            if grid.shape != (self.height, self.width):
                raise CorruptFlow(f"{name} grid shape {grid.shape} != {(self.height, self.width)}")
            if not np.all(np.isfinite(grid)):
                raise CorruptFlow(f"non-finite values in {name} grid")
            grid.setflags(write=False)


class FlowProvider(Protocol):
    """Source of the flow field for the transition into a given frame.

    Must yield fields of constant (width, height) across a sequence.
    Returning None means no flow is available for that transition.
    """

    def get(self, frame: int) -> FlowField | None: ...


def read_flow_file(data: bytes) -> FlowField:
    """Decode a Middlebury .flo byte stream into a FlowField."""
    if len(data) < 12:
        if len(data) >= 4 and struct.unpack("<f", data[:4])[0] == FLO_MAGIC:
            raise TruncatedFlow(f"header truncated at {len(data)} bytes")
        raise NotAFlowFile("too short for a .flo header")
    magic, width, height = struct.unpack("<fii", data[:12])
    if magic != FLO_MAGIC:
        raise NotAFlowFile(f"bad magic {magic!r}")
    if width <= 0 or height <= 0:
        raise CorruptFlow(f"non-positive dimensions {width}x{height}")
    expected = 12 + 8 * width * height
    if len(data) < expected:
        raise TruncatedFlow(f"payload has {len(data)} bytes, expected {expected}")
    raw = np.frombuffer(data[12:expected], dtype="<f4").reshape(height, width, 2)
    if not np.all(np.isfinite(raw)):
        raise CorruptFlow("non-finite flow values")
    return FlowField(width=width, height=height, u=raw[:, :, 0].astype(np.float32),
                     v=raw[:, :, 1].astype(np.float32))


def write_flow_file(f: FlowField) -> bytes:
    """Encode a FlowField as .flo bytes; bit-exact inverse of read_flow_file."""
    header = struct.pack("<fii", FLO_MAGIC, f.width, f.height)
    interleaved = np.empty((f.height, f.width, 2), dtype="<f4")
    interleaved[:, :, 0] = f.u
    interleaved[:, :, 1] = f.v
    return header + interleaved.tobytes()


def sample_box_velocity(f: FlowField, cx: float, cy: float) -> tuple[float, float]:
    """Mean flow over the 3x3 pixel window centered at the rounded (cx, cy).

    The window is clamped to the field bounds, so edge centers average the
    surviving sub-window. Centers more than 3 px outside the field raise
    OutOfField.
    """
    if cx < -3.0 or cx > f.width + 3.0 or cy < -3.0 or cy > f.height + 3.0:
        raise OutOfField(f"center ({cx}, {cy}) outside {f.width}x{f.height} field")
    px, py = int(round(cx)), int(round(cy))
    x0, x1 = max(px - 1, 0), min(px + 1, f.width - 1)
    y0, y1 = max(py - 1, 0), min(py + 1, f.height - 1)
    if x0 > x1 or y0 > y1:
        # rounded window fell entirely outside the grid; clamp to the nearest edge pixel
        x0 = x1 = min(max(px, 0), f.width - 1)
        y0 = y1 = min(max(py, 0), f.height - 1)
    window_u = f.u[y0:y1 + 1, x0:x1 + 1]
    window_v = f.v[y0:y1 + 1, x0:x1 + 1]
    return (float(window_u.mean()), float(window_v.mean()))


def synthetic_flow(width: int, height: int, pan: tuple[float, float],
                   objects: list[tuple[Box, tuple[float, float]]] = ()) -> FlowField:
    """Build a flow field from a global pan plus per-object local motions.

    Background pixels carry the pan velocity; pixels inside each object's
    box carry pan + that object's local velocity. Later objects overwrite
    earlier ones where boxes overlap.
    """
    vx, vy = pan
    if not (np.isfinite(vx) and np.isfinite(vy)):
        raise InvalidVelocity(f"non-finite pan ({vx}, {vy})")
    u = np.full((height, width), vx, dtype=np.float32)
    v = np.full((height, width), vy, dtype=np.float32)
    for box, (lx, ly) in objects:
        if not (np.isfinite(lx) and np.isfinite(ly)):
            raise InvalidVelocity(f"non-finite local velocity ({lx}, {ly})")
        x0 = max(int(np.floor(box.left)), 0)
        y0 = max(int(np.floor(box.top)), 0)
        x1 = min(int(np.ceil(box.right)), width)
        y1 = min(int(np.ceil(box.bottom)), height)
        if x0 < x1 and y0 < y1:
            u[y0:y1, x0:x1] = vx + lx
            v[y0:y1, x0:x1] = vy + ly
    return FlowField(width=width, height=height, u=u, v=v)


class DirectoryFlowProvider:
    """Reads `%06d.flo` files from a directory; file N holds the transition
    into frame N (frame 1 has no file). Missing files yield None."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self._size: tuple[int, int] | None = None

    def get(self, frame: int) -> FlowField | None:
        path = self.directory / f"{frame:06d}.flo"
        if not path.is_file():
            return None
        f = read_flow_file(path.read_bytes())
        if self._size is None:
            self._size = (f.width, f.height)
        elif self._size != (f.width, f.height):
            raise CorruptFlow(
                f"flow size changed mid-sequence: {self._size} -> {(f.width, f.height)}"
            )
        return f
