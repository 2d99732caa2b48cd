"""Deterministic synthetic pan-over-a-row scenes for testing and benchmarks.

Object centers follow a global pan plus per-object sinusoidal sway, so
every ground-truth position is available in closed form for independent
oracles. Detections are the ground truth perturbed by a configurable noise
model; scripted occlusion windows suppress both ground truth and
detections. Flow fields are synthesized to carry each visible object's
exact per-frame displacement.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidConfig
from .flow import FlowField, synthetic_flow, write_flow_file
from .geometry import Box, Detection, SequenceMeta, det_state_from_box
from .motio import GtEntry, write_detections, write_ground_truth, write_seqinfo


@dataclass(frozen=True)
class ObjectSpec:
    """One object: mean start center, box size, and sway on each axis."""

    cx: float
    cy: float
    width: float
    height: float
    sway_amp: tuple[float, float] = (0.0, 0.0)
    sway_period: tuple[float, float] = (60.0, 60.0)
    sway_phase: tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class OcclusionWindow:
    """Object `obj` (0-based index) is hidden on frames [first, last] inclusive."""

    obj: int
    first: int
    last: int


@dataclass(frozen=True)
class NoiseModel:
    center_jitter: float = 0.0     # std of the center perturbation, px
    size_jitter: float = 0.0       # std of the relative box-size perturbation
    dropout: float = 0.0           # probability a visible object goes undetected
    hard_frame_prob: float = 0.0   # probability a detection draws a low confidence

    def __post_init__(self):
        for name in ("dropout", "hard_frame_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidConfig(f"{name} must be a probability, got {v}")
        if self.center_jitter < 0 or self.size_jitter < 0:
            raise InvalidConfig("jitter stds must be non-negative")


@dataclass(frozen=True)
class SceneConfig:
    name: str
    frame_count: int
    image_width: int
    image_height: int
    pan: tuple[float, float] = (0.0, 0.0)
    objects: tuple[ObjectSpec, ...] = ()
    occlusions: tuple[OcclusionWindow, ...] = ()
    noise: NoiseModel = field(default_factory=NoiseModel)
    seed: int = 0
    frame_rate: float = 30.0

    def __post_init__(self):
        if self.frame_count < 1:
            raise InvalidConfig("frame_count must be >= 1")
        for occ in self.occlusions:
            if not (1 <= occ.first <= occ.last <= self.frame_count):
                raise InvalidConfig(f"occlusion window {occ} outside [1, {self.frame_count}]")
            if not 0 <= occ.obj < len(self.objects):
                raise InvalidConfig(f"occlusion references unknown object {occ.obj}")


class SyntheticFlowProvider:
    """Lazily synthesizes the flow field for any transition of a scene."""

    def __init__(self, cfg: SceneConfig):
        self.cfg = cfg

    def get(self, frame: int) -> FlowField | None:
        if frame < 2 or frame > self.cfg.frame_count:
            return None
        return scene_flow(self.cfg, frame)


@dataclass(frozen=True)
class Scene:
    config: SceneConfig
    meta: SequenceMeta
    gt: list[GtEntry]
    detections: list[Detection]
    flow: SyntheticFlowProvider


def object_center(cfg: SceneConfig, obj: int, frame: int) -> tuple[float, float]:
    """Closed-form center of object `obj` at `frame` (1-based)."""
    spec = cfg.objects[obj]
    t = frame - 1
    ax, ay = spec.sway_amp
    tx, ty = spec.sway_period
    phx, phy = spec.sway_phase
    x = spec.cx + cfg.pan[0] * t + ax * math.sin(2.0 * math.pi * t / tx + phx)
    y = spec.cy + cfg.pan[1] * t + ay * math.sin(2.0 * math.pi * t / ty + phy)
    return x, y


def object_box(cfg: SceneConfig, obj: int, frame: int) -> Box:
    cx, cy = object_center(cfg, obj, frame)
    spec = cfg.objects[obj]
    return Box(cx - spec.width / 2.0, cy - spec.height / 2.0, spec.width, spec.height)


def _occluded(cfg: SceneConfig, obj: int, frame: int) -> bool:
    return any(o.obj == obj and o.first <= frame <= o.last for o in cfg.occlusions)


def _in_frame(cfg: SceneConfig, obj: int, frame: int) -> bool:
    cx, cy = object_center(cfg, obj, frame)
    return 0.0 <= cx <= cfg.image_width and 0.0 <= cy <= cfg.image_height


def _visible(cfg: SceneConfig, obj: int, frame: int) -> bool:
    return not _occluded(cfg, obj, frame) and _in_frame(cfg, obj, frame)


def scene_flow(cfg: SceneConfig, frame: int) -> FlowField:
    """Flow for the transition into `frame`: pan everywhere, plus each
    object's sway displacement painted over its previous-frame box when the
    object is visible at both endpoints of the transition."""
    moving = []
    for i in range(len(cfg.objects)):
        if not (_visible(cfg, i, frame - 1) and _visible(cfg, i, frame)):
            continue
        x0, y0 = object_center(cfg, i, frame - 1)
        x1, y1 = object_center(cfg, i, frame)
        local = (x1 - x0 - cfg.pan[0], y1 - y0 - cfg.pan[1])
        moving.append((object_box(cfg, i, frame - 1), local))
    return synthetic_flow(cfg.image_width, cfg.image_height, cfg.pan, moving)


def generate_scene(cfg: SceneConfig) -> Scene:
    """Produce ground truth, noisy detections, flow provider and metadata."""
    meta = SequenceMeta(
        name=cfg.name, frame_count=cfg.frame_count,
        image_width=cfg.image_width, image_height=cfg.image_height,
        frame_rate=cfg.frame_rate,
    )
    rng = np.random.default_rng(cfg.seed)
    gt: list[GtEntry] = []
    detections: list[Detection] = []
    noise = cfg.noise
    for frame in range(1, cfg.frame_count + 1):
        for i in range(len(cfg.objects)):
            if not _visible(cfg, i, frame):
                continue
            box = object_box(cfg, i, frame)
            gt.append(GtEntry(frame=frame, id=i + 1, box=box, flag=1, cls=1, visibility=1.0))
            if noise.dropout > 0 and rng.random() < noise.dropout:
                continue
            cx, cy = box.center
            if noise.center_jitter > 0:
                cx += rng.normal(0.0, noise.center_jitter)
                cy += rng.normal(0.0, noise.center_jitter)
            w, h = box.width, box.height
            if noise.size_jitter > 0:
                w *= float(np.clip(1.0 + rng.normal(0.0, noise.size_jitter), 0.2, 5.0))
                h *= float(np.clip(1.0 + rng.normal(0.0, noise.size_jitter), 0.2, 5.0))
            hard = noise.hard_frame_prob > 0 and rng.random() < noise.hard_frame_prob
            conf = float(rng.uniform(0.2, 0.6)) if hard else float(rng.uniform(0.7, 1.0))
            _, _, s, w_ = det_state_from_box(Box(cx - w / 2.0, cy - h / 2.0, w, h))
            detections.append(Detection(frame=frame, cx=cx, cy=cy, s=s, w=w_, conf=conf))
    return Scene(config=cfg, meta=meta, gt=gt, detections=detections,
                 flow=SyntheticFlowProvider(cfg))


def export_scene(scene: Scene, directory: str | Path) -> Path:
    """Write the MOT17 layout plus per-transition flow files.

    Produces <dir>/seqinfo.ini, <dir>/gt/gt.txt, <dir>/det/det.txt and
    <dir>/flow/%06d.flo for frames 2..frame_count.
    """
    root = Path(directory)
    (root / "gt").mkdir(parents=True, exist_ok=True)
    (root / "det").mkdir(parents=True, exist_ok=True)
    (root / "flow").mkdir(parents=True, exist_ok=True)
    (root / "seqinfo.ini").write_text(write_seqinfo(scene.meta), encoding="utf-8")
    (root / "gt" / "gt.txt").write_text(write_ground_truth(scene.gt), encoding="utf-8")
    (root / "det" / "det.txt").write_text(write_detections(scene.detections), encoding="utf-8")
    for frame in range(2, scene.config.frame_count + 1):
        data = write_flow_file(scene_flow(scene.config, frame))
        (root / "flow" / f"{frame:06d}.flo").write_bytes(data)
    return root


def scene_config_to_dict(cfg: SceneConfig) -> dict:
    return asdict(cfg)


def scene_config_from_dict(raw: dict) -> SceneConfig:
    """Build a SceneConfig from plain JSON data (lists become tuples)."""
    try:
        objects = tuple(
            ObjectSpec(
                cx=o["cx"], cy=o["cy"], width=o["width"], height=o["height"],
                sway_amp=tuple(o.get("sway_amp", (0.0, 0.0))),
                sway_period=tuple(o.get("sway_period", (60.0, 60.0))),
                sway_phase=tuple(o.get("sway_phase", (0.0, 0.0))),
            )
            for o in raw.get("objects", [])
        )
        occlusions = tuple(
            OcclusionWindow(obj=o["obj"], first=o["first"], last=o["last"])
            for o in raw.get("occlusions", [])
        )
        noise = NoiseModel(**raw.get("noise", {}))
        return SceneConfig(
            name=raw["name"],
            frame_count=raw["frame_count"],
            image_width=raw["image_width"],
            image_height=raw["image_height"],
            pan=tuple(raw.get("pan", (0.0, 0.0))),
            objects=objects,
            occlusions=occlusions,
            noise=noise,
            seed=raw.get("seed", 0),
            frame_rate=raw.get("frame_rate", 30.0),
        )
    except (KeyError, TypeError) as e:
        raise InvalidConfig(f"bad scene config: {e}") from e


def load_scene_config(path: str | Path) -> SceneConfig:
    with open(path, "r", encoding="utf-8") as f:
        return scene_config_from_dict(json.load(f))
