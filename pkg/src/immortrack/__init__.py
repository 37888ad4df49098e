"""Tracking-by-detection for 3D boxes with tracklets that are never terminated.

Unmatched tracklets coast on a constant-velocity Kalman prediction instead of
being deleted, so an object that reappears after an occlusion is re-associated
with its original identity.
"""

from .association import AssocConfig, AssociationResult, Metric, associate, hungarian, similarity_matrix
from .geometry import Box3D, bev_corners, giou3d, iou3d, polygon_intersection_area
from .kalman import KfConfig, KfState, kf_coast, kf_init, kf_predict, kf_update
from .metrics import EvalReport, GroundTruthTrack, classify_ids, clear_mot
from .preprocess import Detection, PreprocessConfig, nms3d, score_filter
from .simulate import Scenario, ScenarioConfig, generate, occlusion_report
from .tracker import FrameResult, Mode, Tracker, TrackerConfig, run_sequence

__version__ = "0.1.0"

__all__ = [
    "AssocConfig", "AssociationResult", "Metric", "associate", "hungarian", "similarity_matrix",
    "Box3D", "bev_corners", "giou3d", "iou3d", "polygon_intersection_area",
    "KfConfig", "KfState", "kf_coast", "kf_init", "kf_predict", "kf_update",
    "EvalReport", "GroundTruthTrack", "classify_ids", "clear_mot",
    "Detection", "PreprocessConfig", "nms3d", "score_filter",
    "Scenario", "ScenarioConfig", "generate", "occlusion_report",
    "FrameResult", "Mode", "Tracker", "TrackerConfig", "run_sequence",
]
