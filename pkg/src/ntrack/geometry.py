"""Domain value types and bounding-box geometry.

Boxes live in continuous (sub-pixel) image coordinates. The tracker-side
state of a box is the tuple (cx, cy, s, w): center, area and width, with
height recoverable as s / w. Frames are 1-based, matching the MOT file
convention.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidBox, InvalidState


@dataclass(frozen=True)
class Box:
    """Axis-aligned box in corner form: (left, top) plus positive size."""

    left: float
    top: float
    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise InvalidBox(f"non-positive box size {self.width}x{self.height}")

    @property
    def right(self) -> float:
        return self.left + self.width

    @property
    def bottom(self) -> float:
        return self.top + self.height

    @property
    def center(self) -> tuple[float, float]:
        return (self.left + self.width / 2.0, self.top + self.height / 2.0)

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class Detection:
    """One detector response: box center, area, width and a confidence score."""

    frame: int
    cx: float
    cy: float
    s: float
    w: float
    conf: float

    def __post_init__(self):
        if self.frame < 1:
            raise InvalidState(f"frame must be >= 1, got {self.frame}")
        if not (self.s > 0 and self.w > 0):
            raise InvalidState(f"non-positive detection size s={self.s} w={self.w}")

    @property
    def box(self) -> Box:
        return box_from_det_state(self.cx, self.cy, self.s, self.w)


@dataclass(frozen=True)
class SequenceMeta:
    """Static properties of one video sequence."""

    name: str
    frame_count: int
    image_width: int
    image_height: int
    frame_rate: float = 30.0

    def __post_init__(self):
        if self.frame_count < 1 or self.image_width < 1 or self.image_height < 1:
            raise InvalidState("sequence dimensions must be positive")
        if self.frame_rate <= 0:
            raise InvalidState("frame rate must be positive")


def det_state_from_box(b: Box) -> tuple[float, float, float, float]:
    """Convert a corner-form box to the (cx, cy, s, w) tracker state."""
    return (b.left + b.width / 2.0, b.top + b.height / 2.0, b.width * b.height, b.width)


def box_from_det_state(cx: float, cy: float, s: float, w: float) -> Box:
    """Convert a (cx, cy, s, w) state back to corner form. Inverse of det_state_from_box."""
    if s <= 0 or w <= 0:
        raise InvalidState(f"non-positive state s={s} w={w}")
    h = s / w
    return Box(cx - w / 2.0, cy - h / 2.0, w, h)


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two boxes; 0 when disjoint.

    Clamped to [0, 1]: corner arithmetic can otherwise push the ratio a few
    ulp past 1 when the boxes coincide.
    """
    iw = min(a.right, b.right) - max(a.left, b.left)
    ih = min(a.bottom, b.bottom) - max(a.top, b.top)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return min(inter / (a.area + b.area - inter), 1.0)
