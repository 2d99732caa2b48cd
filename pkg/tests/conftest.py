"""Shared synthetic-scene factories for the test suite."""

import numpy as np

from ntrack import NoiseModel, ObjectSpec, OcclusionWindow, SceneConfig


def co_moving_occlusion_scene(seed: int) -> tuple[SceneConfig, int]:
    """A cluster of co-moving swaying objects with one long occlusion.

    All objects share the sway signal (one gust moving the whole cluster),
    sized so that following the pan alone for the occlusion span leaves the
    hidden object far from its reappearance point. Returns the config and
    the occluded object's index.
    """
    rng = np.random.default_rng(seed)
    n_obj = int(rng.integers(5, 8))
    amp = (float(rng.uniform(45, 75)), float(rng.uniform(25, 50)))
    period = (float(rng.uniform(80, 130)), float(rng.uniform(70, 120)))
    phase = (float(rng.uniform(0, 2 * np.pi)), float(rng.uniform(0, 2 * np.pi)))
    frame_count = 170
    occ_len = int(rng.integers(50, 81))
    occ_first = int(rng.integers(25, frame_count - occ_len - 25))
    occ_obj = int(rng.integers(0, n_obj))
    objects = tuple(
        ObjectSpec(
            cx=300 + (i % 4) * 95 + float(rng.uniform(-12, 12)),
            cy=150 + (i // 4) * 95 + float(rng.uniform(-12, 12)),
            width=36, height=36,
            sway_amp=amp, sway_period=period, sway_phase=phase,
        )
        for i in range(n_obj)
    )
    cfg = SceneConfig(
        name=f"occ{seed}", frame_count=frame_count,
        image_width=960, image_height=540, pan=(-0.8, 0.0),
        objects=objects,
        occlusions=(OcclusionWindow(obj=occ_obj, first=occ_first,
                                    last=occ_first + occ_len - 1),),
        noise=NoiseModel(center_jitter=1.0, size_jitter=0.02),
        seed=seed,
    )
    return cfg, occ_obj


def grid_scene(n_objects: int, seed: int, frame_count: int = 20,
               noise: NoiseModel | None = None) -> SceneConfig:
    """Objects on a grid with a shared gentle sway; supports up to 54 objects."""
    assert n_objects <= 54
    rng = np.random.default_rng(seed)
    amp = (float(rng.uniform(3, 6)), float(rng.uniform(2, 5)))
    period = (float(rng.uniform(40, 80)), float(rng.uniform(40, 80)))
    phase = (float(rng.uniform(0, 2 * np.pi)), float(rng.uniform(0, 2 * np.pi)))
    objects = tuple(
        ObjectSpec(
            cx=90 + (i % 9) * 62, cy=55 + (i // 9) * 55,
            width=30, height=30,
            sway_amp=amp, sway_period=period, sway_phase=phase,
        )
        for i in range(n_objects)
    )
    return SceneConfig(
        name=f"grid{seed}", frame_count=frame_count,
        image_width=700, image_height=400, pan=(-0.5, 0.0),
        objects=objects, noise=noise or NoiseModel(), seed=seed,
    )
