"""Estimator-style front end so the tracker composes with sklearn tooling.

NTrack follows the estimator conventions: every hyperparameter is a flat
constructor argument stored verbatim (so get_params/set_params/clone work),
nothing is validated until the tracker actually runs, and fit is a no-op
kept for pipeline compatibility. predict() consumes a SequenceData bundle
and returns the TrackingResult.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator

from .assoc import AssocConfig
from .errors import SequenceError
from .filters import FilterConfig
from .tracker import SequenceData, TrackerConfig, TrackingResult, run_sequence


def check_sequence(sequence: SequenceData) -> SequenceData:
    """Validate that a sequence bundle is internally consistent."""
    meta = sequence.meta
    for d in sequence.detections:
        if not 1 <= d.frame <= meta.frame_count:
            raise SequenceError(
                f"detection frame {d.frame} outside [1, {meta.frame_count}] of {meta.name!r}")
    return sequence


class NTrack(BaseEstimator):
    """Detector-agnostic multiple object tracker and counter.

    Tracks box centers with flow-driven particle filters, box sizes with a
    constant-velocity Kalman filter, associates detections in two
    confidence stages, and re-identifies occluded objects from linear
    models of their neighbors' locations.
    """

    def __init__(self, n_particles=100, process_sigma=5.0, meas_sigma=10.0,
                 resample_threshold=0.5, kalman_process_scale=0.05,
                 kalman_meas_scale=0.05, conf_high=0.6, iou_min_stage1=0.2,
                 iou_min_stage2=0.4, conf_init=0.7, rla=True, neighbors=3,
                 min_pair_samples=3, var_floor=1.0, history_max=300,
                 dormant_max=100, confirm_hits=2, border_slack=0.0, seed=0):
        self.n_particles = n_particles
        self.process_sigma = process_sigma
        self.meas_sigma = meas_sigma
        self.resample_threshold = resample_threshold
        self.kalman_process_scale = kalman_process_scale
        self.kalman_meas_scale = kalman_meas_scale
        self.conf_high = conf_high
        self.iou_min_stage1 = iou_min_stage1
        self.iou_min_stage2 = iou_min_stage2
        self.conf_init = conf_init
        self.rla = rla
        self.neighbors = neighbors
        self.min_pair_samples = min_pair_samples
        self.var_floor = var_floor
        self.history_max = history_max
        self.dormant_max = dormant_max
        self.confirm_hits = confirm_hits
        self.border_slack = border_slack
        self.seed = seed

    def build_config(self) -> TrackerConfig:
        """Resolve and validate the flat parameters into the nested config."""
        return TrackerConfig(
            filter=FilterConfig(
                n_particles=self.n_particles,
                process_sigma=self.process_sigma,
                meas_sigma=self.meas_sigma,
                resample_threshold=self.resample_threshold,
                kalman_process_scale=self.kalman_process_scale,
                kalman_meas_scale=self.kalman_meas_scale,
            ),
            assoc=AssocConfig(
                conf_high=self.conf_high,
                iou_min_stage1=self.iou_min_stage1,
                iou_min_stage2=self.iou_min_stage2,
                conf_init=self.conf_init,
            ),
            rla_enabled=self.rla,
            rla_neighbors=self.neighbors,
            rla_min_samples=self.min_pair_samples,
            rla_var_floor=self.var_floor,
            rla_history_max=self.history_max,
            dormant_max=self.dormant_max,
            confirm_hits=self.confirm_hits,
            border_slack=self.border_slack,
        )

    def fit(self, X=None, y=None):
        # nothing to learn; present so the estimator drops into pipelines
        return self

    def predict(self, sequence: SequenceData) -> TrackingResult:
        """Run the tracker over a full sequence."""
        check_sequence(sequence)
        return run_sequence(sequence.meta, sequence.flow, sequence.detections,
                            self.build_config(), self.seed)
