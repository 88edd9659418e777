# Software License Agreement (BSD License)
#
# Copyright (c) 2026, beltrack contributors
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without
# modification, are permitted provided that the following conditions
# are met:
#
#  * Redistributions of source code must retain the above copyright
#    notice, this list of conditions and the following disclaimer.
#  * Redistributions in binary form must reproduce the above
#    copyright notice, this list of conditions and the following
#    disclaimer in the documentation and/or other materials provided
#    with the distribution.
#
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS
# "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT
# LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS
# FOR A PARTICULAR PURPOSE ARE DISCLAIMED.

"""
Video-level quality metrics (defect ratio, temporal stability),
classification scores, single-class detection AP and ID-switch counting
against simulator ground truth.
"""

from dataclasses import asdict, dataclass, field
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .aggregation import (DEFAULT_AGGREGATION_CONFIG, AggregationConfig,
                          PredictionBuffer, TrackVerdict, frame_wise_verdicts,
                          majority_vote)
from .conveyor_sim import SceneGroundTruth
from .core import BeltrackError, BinaryQuality, FrameDetections, Track, iou, to_binary

FRAME_WISE = 'frame_wise'
AGGREGATED = 'aggregated'
MODES = (FRAME_WISE, AGGREGATED)

DECISION_RULES = ('last', 'first', 'random')
STABILITY_LABELS = ('binary', 'category')


class UndefinedMetric(BeltrackError):
    pass


class LengthMismatch(BeltrackError, ValueError):
    pass


@dataclass(frozen=True)
class MetricsConfig:
    frame_wise_decision: str = 'last'
    frame_wise_seed: int = 0
    stability_labels: str = 'binary'
    map_iou_thresholds: Tuple[float, ...] = (0.5,)
    id_switch_iou: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, 'map_iou_thresholds',
                           tuple(float(t) for t in self.map_iou_thresholds))
        if self.frame_wise_decision not in DECISION_RULES:
            raise ValueError("frame_wise_decision must be one of %s, got %r" %
                             (DECISION_RULES, self.frame_wise_decision))
        if self.stability_labels not in STABILITY_LABELS:
            raise ValueError("stability_labels must be one of %s, got %r" %
                             (STABILITY_LABELS, self.stability_labels))
        if not self.map_iou_thresholds:
            raise ValueError("map_iou_thresholds must not be empty")
        for t in self.map_iou_thresholds + (self.id_switch_iou,):
            if not 0.0 < t <= 1.0:
                raise ValueError("IoU threshold %r outside (0, 1]" % t)


DEFAULT_METRICS_CONFIG = MetricsConfig()


@dataclass
class VideoQualityReport:
    defect_ratio: float
    per_track_stability: Dict[int, float] = field(default_factory=dict)
    mean_stability: float = 1.0
    n_total_tracks: int = 0
    n_defect_tracks: int = 0
    mode: str = AGGREGATED

    def to_dict(self):
        d = asdict(self)
        # JSON object keys are strings
        d['per_track_stability'] = dict((str(k), v) for k, v in
                                        sorted(self.per_track_stability.items()))
        return d


class ClassificationScores(NamedTuple):
    accuracy: float
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]


def defect_ratio(verdicts: Sequence[TrackVerdict]) -> float:
    """
    :raises: :exc:`UndefinedMetric` for an empty verdict list
    """
    if not verdicts:
        raise UndefinedMetric("defect ratio of zero tracks")
    n_defect = sum(1 for v in verdicts if v.final_binary == BinaryQuality.DEFECT)
    return n_defect / float(len(verdicts))


def temporal_stability(labels: Sequence) -> float:
    """
    ``1 - changes / k`` for a length-k label sequence. Dividing by k
    rather than k - 1 means the most unstable sequence scores 1/k.

    >>> temporal_stability(['d', 'n', 'd', 'n'])
    0.25

    :raises: :exc:`UndefinedMetric` for an empty sequence
    """
    k = len(labels)
    if k == 0:
        raise UndefinedMetric("temporal stability of an empty label sequence")
    changes = sum(1 for t in range(1, k) if labels[t] != labels[t - 1])
    return 1.0 - changes / float(k)


def _frame_wise_decision(labels, rule, rng):
    if rule == 'first':
        return labels[0]
    if rule == 'random':
        return labels[int(rng.integers(0, len(labels)))]
    return labels[-1]


def stability_report(buffers: Sequence[PredictionBuffer], mode: str,
                     aggregation_config: AggregationConfig = DEFAULT_AGGREGATION_CONFIG,
                     config: MetricsConfig = DEFAULT_METRICS_CONFIG) -> VideoQualityReport:
    """
    Score a video's tracks either frame by frame (no aggregation, the
    per-track decision taken by ``config.frame_wise_decision``) or after
    the majority vote, where every track's label sequence is constant.

    :raises: :exc:`UndefinedMetric` for no buffers,
      :exc:`beltrack.aggregation.EmptyBuffer` for a buffer with no entries
    """
    if mode not in MODES:
        raise ValueError("mode must be one of %s, got %r" % (MODES, mode))
    if not buffers:
        raise UndefinedMetric("no prediction buffers to report on")

    rng = np.random.default_rng(config.frame_wise_seed)
    per_track = {}
    decisions = []
    for buf in buffers:
        if mode == FRAME_WISE:
            binary = frame_wise_verdicts(buf)
            if config.stability_labels == 'category':
                per_track[buf.track_id] = temporal_stability([l.index for l in buf.labels])
            else:
                per_track[buf.track_id] = temporal_stability(binary)
            decisions.append(_frame_wise_decision(binary, config.frame_wise_decision, rng))
        else:
            verdict = majority_vote(buf, aggregation_config)
            per_track[buf.track_id] = temporal_stability([verdict.final_category] * verdict.k)
            decisions.append(verdict.final_binary)

    n_defect = sum(1 for d in decisions if d == BinaryQuality.DEFECT)
    return VideoQualityReport(defect_ratio=n_defect / float(len(decisions)),
                              per_track_stability=per_track,
                              mean_stability=float(np.mean(list(per_track.values()))),
                              n_total_tracks=len(decisions),
                              n_defect_tracks=n_defect,
                              mode=mode)


def frame_wise_decisions(buffers: Sequence[PredictionBuffer],
                         config: MetricsConfig = DEFAULT_METRICS_CONFIG) -> Dict[int, BinaryQuality]:
    """
    Per-track binary decision of the no-aggregation baseline, drawn the
    same way :func:`stability_report` draws it.
    """
    rng = np.random.default_rng(config.frame_wise_seed)
    return dict((buf.track_id,
                 _frame_wise_decision(frame_wise_verdicts(buf), config.frame_wise_decision, rng))
                for buf in buffers)


def classification_metrics(pred: Sequence[BinaryQuality], truth: Sequence[BinaryQuality],
                           positive: BinaryQuality = BinaryQuality.DEFECT) -> ClassificationScores:
    """
    Accuracy, precision, recall and F1 with ``positive`` as the positive
    class. Precision, recall and F1 are ``None`` when undefined; F1 is
    0.0 when both are defined and zero.

    :raises: :exc:`LengthMismatch`, :exc:`UndefinedMetric` for empty input
    """
    if len(pred) != len(truth):
        raise LengthMismatch("%d predictions for %d truth labels" % (len(pred), len(truth)))
    if not pred:
        raise UndefinedMetric("classification metrics of zero samples")
    tp = fp = fn = tn = 0
    for p, t in zip(pred, truth):
        if p == positive:
            if t == positive:
                tp += 1
            else:
                fp += 1
        elif t == positive:
            fn += 1
        else:
            tn += 1
    accuracy = (tp + tn) / float(len(pred))
    precision = tp / float(tp + fp) if tp + fp else None
    recall = tp / float(tp + fn) if tp + fn else None
    f1 = None
    if precision is not None and recall is not None:
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return ClassificationScores(accuracy, precision, recall, f1)


def confusion_matrix(pred: Sequence, truth: Sequence, num_categories: int) -> np.ndarray:
    """
    Counts with true categories on rows and predicted ones on columns.
    Labels may be :class:`CategoryLabel` or bare indices.

    :raises: :exc:`LengthMismatch`
    """
    if len(pred) != len(truth):
        raise LengthMismatch("%d predictions for %d truth labels" % (len(pred), len(truth)))
    m = np.zeros((num_categories, num_categories), dtype=int)
    for p, t in zip(pred, truth):
        m[int(t), int(p)] += 1
    return m


def _sweep(dets, gt, iou_threshold):
    gt_by_frame = {}
    for frame in gt:
        gt_by_frame.setdefault(frame.frame_index, []).extend(d.box for d in frame.detections)
    n_gt = sum(len(boxes) for boxes in gt_by_frame.values())
    if n_gt == 0:
        raise UndefinedMetric("no ground-truth boxes")

    flat = [d for frame in dets for d in frame.detections]
    # stable, so equal scores keep input order
    order = sorted(range(len(flat)), key=lambda i: -flat[i].score)
    matched = dict((f, [False] * len(boxes)) for f, boxes in gt_by_frame.items())
    tp = np.zeros(len(flat))
    for rank, i in enumerate(order):
        d = flat[i]
        boxes = gt_by_frame.get(d.frame_index, [])
        best, best_iou = None, -1.0
        for g, box in enumerate(boxes):
            if matched[d.frame_index][g]:
                continue
            overlap = iou(d.box, box)
            if overlap > best_iou:
                best, best_iou = g, overlap
        if best is not None and best_iou >= iou_threshold:
            matched[d.frame_index][best] = True
            tp[rank] = 1.0
    scores = np.array([flat[i].score for i in order], dtype=float)
    return tp, scores, n_gt


def precision_recall_curve(dets: Sequence[FrameDetections], gt: Sequence[FrameDetections],
                           iou_threshold: float = 0.5):
    """
    :returns: (recall, precision, scores) arrays, one entry per detection
      in descending score order
    :raises: :exc:`UndefinedMetric` when ``gt`` holds no boxes
    """
    tp, scores, n_gt = _sweep(dets, gt, iou_threshold)
    tp_cum = np.cumsum(tp)
    fp_cum = np.cumsum(1.0 - tp)
    recall = tp_cum / float(n_gt)
    precision = tp_cum / np.maximum(tp_cum + fp_cum, np.finfo(float).eps)
    return recall, precision, scores


def average_precision(recall, precision) -> float:
    """
    Area under the precision envelope (all-point interpolation).

    >>> average_precision([0.5], [1.0])
    0.5
    """
    mrec = np.concatenate(([0.0], recall, [1.0]))
    mpre = np.concatenate(([0.0], precision, [0.0]))
    mpre = np.maximum.accumulate(mpre[::-1])[::-1]
    i = np.flatnonzero(mrec[1:] != mrec[:-1])
    return float(np.sum((mrec[i + 1] - mrec[i]) * mpre[i + 1]))


def detection_map(dets: Sequence[FrameDetections], gt: Sequence[FrameDetections],
                  iou_threshold=0.5) -> float:
    """
    Single-class AP, or the mean AP when ``iou_threshold`` is a sequence of
    thresholds.

    :raises: :exc:`UndefinedMetric` when ``gt`` holds no boxes
    """
    thresholds = np.atleast_1d(np.asarray(iou_threshold, dtype=float))
    aps = []
    for t in thresholds:
        recall, precision, _ = precision_recall_curve(dets, gt, float(t))
        aps.append(average_precision(recall, precision))
    return float(np.mean(aps))


def _tracks_by_frame(tracks):
    per_frame = {}
    for track in tracks:
        for f, box in track.history:
            per_frame.setdefault(f, []).append((track.id, box))
    return per_frame


def count_id_switches(tracks: Sequence[Track], gt: SceneGroundTruth,
                      iou_threshold: float = 0.5) -> int:
    """
    For each ground-truth object, the track covering it in a frame is the
    one with the highest IoU >= ``iou_threshold`` (lowest id on ties);
    every change of covering track between covered frames is a switch.
    """
    per_frame = _tracks_by_frame(tracks)
    switches = 0
    for obj in gt.objects:
        previous = None
        for f, true_box in obj.boxes:
            best_id, best_iou = None, iou_threshold
            for track_id, box in per_frame.get(f, []):
                overlap = iou(box, true_box)
                if overlap > best_iou or (overlap == best_iou and
                                          (best_id is None or track_id < best_id)):
                    best_id, best_iou = track_id, overlap
            if best_id is None:
                continue
            if previous is not None and best_id != previous:
                switches += 1
            previous = best_id
    return switches


def match_tracks_to_objects(tracks: Sequence[Track], gt: SceneGroundTruth,
                            iou_threshold: float = 0.5) -> Dict[int, int]:
    """
    Map each track id to the ground-truth object it overlaps with IoU >=
    ``iou_threshold`` on the most frames (lowest object id on ties).
    Tracks overlapping no object are left out.
    """
    gt_by_frame = {}
    for obj in gt.objects:
        for f, box in obj.boxes:
            gt_by_frame.setdefault(f, []).append((obj.object_id, box))
    mapping = {}
    for track in tracks:
        hits = {}
        for f, box in track.history:
            for object_id, true_box in gt_by_frame.get(f, []):
                if iou(box, true_box) >= iou_threshold:
                    hits[object_id] = hits.get(object_id, 0) + 1
        if hits:
            mapping[track.id] = min(hits, key=lambda o: (-hits[o], o))
    return mapping


def verdict_accuracy(decisions: Mapping[int, BinaryQuality], gt: SceneGroundTruth,
                     track_to_object: Mapping[int, int]) -> float:
    """
    Binary accuracy of per-track decisions against the true category of
    each track's matched object; unmatched tracks are not scored.

    :raises: :exc:`UndefinedMetric` when no decided track is matched
    """
    truth = dict((obj.object_id, to_binary(obj.true_category)) for obj in gt.objects)
    pairs = [(d, truth[track_to_object[tid]]) for tid, d in sorted(decisions.items())
             if tid in track_to_object]
    if not pairs:
        raise UndefinedMetric("no decided track matches a ground-truth object")
    return sum(1 for d, t in pairs if d == t) / float(len(pairs))


def final_decisions(verdicts: Sequence[TrackVerdict]) -> Dict[int, BinaryQuality]:
    return dict((v.track_id, v.final_binary) for v in verdicts)


def id_switch_summary(tracks: List[Track], gt: SceneGroundTruth,
                      config: MetricsConfig = DEFAULT_METRICS_CONFIG) -> Dict[str, int]:
    return {'id_switches': count_id_switches(tracks, gt, config.id_switch_iou),
            'n_tracks': len(tracks),
            'n_objects': len(gt.objects)}
