"""Detector-agnostic multiple object tracking, counting and evaluation."""

from .assoc import AssocConfig, AssocResult, associate_two_stage, cost_matrix, solve_assignment
from .estimator import NTrack, check_sequence
from .filters import (FilterConfig, KalmanSW, ParticleSet, kf_init, kf_predict,
                      kf_update, pf_estimate, pf_init, pf_predict, pf_update)
from .flow import (DirectoryFlowProvider, FlowField, FlowProvider, read_flow_file,
                   sample_box_velocity, synthetic_flow, write_flow_file)
from .geometry import Box, Detection, SequenceMeta, box_from_det_state, det_state_from_box, iou
from .metrics import (CountPair, MetricsReport, aggregate_reports, clear_and_id_metrics,
                      filter_margin, format_report, mape, paired_t_test_one_sided, rmse)
from .motio import (GtEntry, ResultEntry, parse_detections, parse_ground_truth,
                    parse_results, parse_seqinfo, write_results)
from .rla import (Gaussian1D, NeighborHistories, PairModel, PairSample, RlaProxy,
                  estimate_from_neighbor, fit_pair_model, fuse_estimates,
                  rank_neighbors, record_neighbors, rla_estimate)
from .synth import (NoiseModel, ObjectSpec, OcclusionWindow, Scene, SceneConfig,
                    export_scene, generate_scene, load_scene_config)
from .tracker import (SequenceData, SequenceTracker, Track, TrackerConfig,
                      TrackingResult, TrackStatus, refine, run_sequence)

__version__ = "0.1.0"

__all__ = [
    "AssocConfig", "AssocResult", "associate_two_stage", "cost_matrix", "solve_assignment",
    "NTrack", "check_sequence",
    "FilterConfig", "KalmanSW", "ParticleSet", "kf_init", "kf_predict", "kf_update",
    "pf_estimate", "pf_init", "pf_predict", "pf_update",
    "DirectoryFlowProvider", "FlowField", "FlowProvider", "read_flow_file",
    "sample_box_velocity", "synthetic_flow", "write_flow_file",
    "Box", "Detection", "SequenceMeta", "box_from_det_state", "det_state_from_box", "iou",
    "CountPair", "MetricsReport", "aggregate_reports", "clear_and_id_metrics",
    "filter_margin", "format_report", "mape", "paired_t_test_one_sided", "rmse",
    "GtEntry", "ResultEntry", "parse_detections", "parse_ground_truth",
    "parse_results", "parse_seqinfo", "write_results",
    "Gaussian1D", "NeighborHistories", "PairModel", "PairSample", "RlaProxy",
    "estimate_from_neighbor", "fit_pair_model", "fuse_estimates",
    "rank_neighbors", "record_neighbors", "rla_estimate",
    "NoiseModel", "ObjectSpec", "OcclusionWindow", "Scene", "SceneConfig",
    "export_scene", "generate_scene", "load_scene_config",
    "SequenceData", "SequenceTracker", "Track", "TrackerConfig", "TrackingResult",
    "TrackStatus", "refine", "run_sequence",
    "__version__",
]
