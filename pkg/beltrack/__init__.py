"""
Tracking-by-detection and track-level quality voting for conveyor-belt
fruit inspection streams.
"""

from .aggregation import (AggregationConfig, EmptyBuffer, PredictionBuffer,
                          TrackVerdict, frame_wise_verdicts, majority_vote,
                          record_prediction, running_verdicts)
from .assignment import AssignmentResult, build_cost_matrix, solve_assignment
from .byte_tracker import (ByteTracker, InvalidTrackerConfig, TrackerConfig,
                           TrackerOutput)
from .conveyor_sim import (InvalidSimConfig, SceneGroundTruth, SimConfig,
                           generate_scene, scene_statistics)
from .core import (BeltrackError, BinaryQuality, BoundingBox, CategoryLabel,
                   Detection, FrameDetections, InvalidBox, InvalidLabel,
                   OutOfOrderFrame, Track, TrackStatus, iou, to_binary)
from .kalman_filter import (FilterDivergence, KalmanConfig, KalmanState,
                            kf_initiate, kf_predict, kf_update, state_to_box)
from .metrics import (LengthMismatch, UndefinedMetric, VideoQualityReport,
                      classification_metrics, count_id_switches,
                      defect_ratio, detection_map, stability_report,
                      temporal_stability)

__version__ = '0.1.0'
