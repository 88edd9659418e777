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
Seeded synthetic conveyor scenes.

Objects enter each lane from the left edge (x increases along the belt)
and move at the belt velocity. Every frame a visible object yields one
detection unless it drops out; boxes are jittered, scores drawn around a
true-positive mean, and category observations flipped to a uniformly
random other category with probability ``label_flip_prob``. False
positives are Poisson per frame with low scores.

All randomness comes from one ``numpy.random.Generator`` (PCG64) seeded
with ``SimConfig.seed``, so a config reproduces its scene exactly.
"""

import logging
import math
from dataclasses import dataclass, field, fields
from typing import List, Optional, Tuple

import numpy as np

from .core import (DEFAULT_NUM_CATEGORIES, FRESH, BeltrackError,
                   BinaryQuality, BoundingBox, CategoryLabel, Detection,
                   FrameDetections, to_binary)


class InvalidSimConfig(BeltrackError, ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    n_lanes: int = 2
    lane_spacing: float = 100.0
    belt_velocity: float = 5.0
    spawn_interval_frames: int = 20
    spawn_jitter_frames: int = 0
    box_size_mean: float = 40.0
    box_size_std: float = 2.0
    n_frames: int = 300
    frame_width: float = 640.0
    frame_height: float = 200.0
    defect_probability: float = 0.3
    # bruise, rot, scab for the default four categories
    defect_category_weights: Tuple[float, ...] = (1.0, 1.0, 1.0)
    detection_dropout_prob: float = 0.0
    bbox_jitter_std: float = 0.0
    false_positive_rate: float = 0.0
    score_mean_true: float = 0.85
    score_std_true: float = 0.05
    score_mean_fp: float = 0.3
    score_std_fp: float = 0.1
    label_flip_prob: float = 0.0
    # stop spawning after this many objects so the belt drains
    n_objects: Optional[int] = None
    num_categories: int = DEFAULT_NUM_CATEGORIES

    def __post_init__(self):
        object.__setattr__(self, 'defect_category_weights',
                           tuple(float(w) for w in self.defect_category_weights))
        for name in ('defect_probability', 'detection_dropout_prob',
                     'label_flip_prob', 'score_mean_true', 'score_mean_fp'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidSimConfig("%s must be in [0, 1], got %r" % (name, value))
        for name in ('lane_spacing', 'belt_velocity', 'box_size_mean',
                     'frame_width', 'frame_height'):
            if not getattr(self, name) > 0:
                raise InvalidSimConfig("%s must be > 0, got %r" % (name, getattr(self, name)))
        for name in ('box_size_std', 'bbox_jitter_std', 'false_positive_rate',
                     'score_std_true', 'score_std_fp', 'spawn_jitter_frames', 'n_frames'):
            if getattr(self, name) < 0:
                raise InvalidSimConfig("%s must be >= 0, got %r" % (name, getattr(self, name)))
        if self.n_lanes < 1:
            raise InvalidSimConfig("n_lanes must be >= 1, got %r" % self.n_lanes)
        if self.spawn_interval_frames < 1:
            raise InvalidSimConfig("spawn_interval_frames must be >= 1, got %r" %
                                   self.spawn_interval_frames)
        if self.num_categories < 2:
            raise InvalidSimConfig("num_categories must be >= 2, got %r" % self.num_categories)
        weights = self.defect_category_weights
        if len(weights) != self.num_categories - 1:
            raise InvalidSimConfig("need %d defect_category_weights, got %d" %
                                   (self.num_categories - 1, len(weights)))
        if min(weights) < 0 or sum(weights) <= 0:
            raise InvalidSimConfig("defect_category_weights must be non-negative with a "
                                   "positive sum, got %r" % (weights,))
        if self.n_objects is not None and self.n_objects < 0:
            raise InvalidSimConfig("n_objects must be >= 0, got %r" % self.n_objects)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


@dataclass
class GroundTruthObject:
    object_id: int
    true_category: CategoryLabel
    # (frame_index, box) for every frame the object is visible
    boxes: List[Tuple[int, BoundingBox]] = field(default_factory=list)
    lane: int = 0

    @property
    def true_binary(self) -> BinaryQuality:
        return to_binary(self.true_category)

    @property
    def lifetime(self) -> int:
        return len(self.boxes)

    def box_at(self, frame_index: int) -> Optional[BoundingBox]:
        for f, box in self.boxes:
            if f == frame_index:
                return box
        return None


@dataclass
class SceneGroundTruth:
    objects: List[GroundTruthObject] = field(default_factory=list)
    n_frames: int = 0

    def by_id(self, object_id: int) -> GroundTruthObject:
        for obj in self.objects:
            if obj.object_id == object_id:
                return obj
        raise KeyError(object_id)

    def as_frames(self) -> List[FrameDetections]:
        """
        True boxes as score-1.0 detections, one entry per frame in
        ``[0, n_frames)``; the reference side of detection mAP.
        """
        per_frame = {}
        for obj in self.objects:
            for f, box in obj.boxes:
                per_frame.setdefault(f, []).append(
                    Detection(f, box, 1.0, obj.true_category))
        last = max([self.n_frames - 1] + list(per_frame.keys()))
        return [FrameDetections(f, per_frame.get(f, [])) for f in range(last + 1)]


@dataclass(frozen=True)
class SceneStatistics:
    n_objects: int
    n_defect: int
    defect_fraction: float
    mean_visible_lifetime: float


def visible_lifetime(box_width: float, config: SimConfig) -> int:
    """
    Frames an object of width ``box_width`` spends at least partly inside
    the frame, ignoring the end of the recording.

    >>> visible_lifetime(40.0, SimConfig(frame_width=100.0, belt_velocity=5.0))
    27
    """
    return int(math.ceil((config.frame_width + box_width) / config.belt_velocity)) - 1


def _spawn_schedule(rng, config):
    interval = config.spawn_interval_frames
    jitter = config.spawn_jitter_frames
    min_gap = int(math.ceil(interval / 2.0))
    spawns = []
    for lane in range(config.n_lanes):
        s = 0
        while s < config.n_frames:
            spawns.append((s, lane))
            gap = interval
            if jitter > 0:
                gap += int(rng.integers(-jitter, jitter + 1))
            s += max(gap, min_gap)
    spawns.sort()
    if config.n_objects is not None:
        spawns = spawns[:config.n_objects]
    return spawns


def _draw_size(rng, mean, std):
    if std == 0:
        return mean
    size = float(np.clip(rng.normal(mean, std), mean - 3 * std, mean + 3 * std))
    return max(size, 1.0)


def _draw_score(rng, mean, std):
    if std == 0:
        return mean
    return float(np.clip(rng.normal(mean, std), 0.0, 1.0))


def _draw_category(rng, config, weights):
    if rng.random() < config.defect_probability:
        return 1 + int(rng.choice(len(weights), p=weights))
    return FRESH


def _observe(rng, true_index, config):
    if config.label_flip_prob > 0 and rng.random() < config.label_flip_prob:
        other = int(rng.integers(0, config.num_categories - 1))
        if other >= true_index:
            other += 1
        return other
    return true_index


def generate_scene(config: SimConfig) -> Tuple[SceneGroundTruth, List[FrameDetections]]:
    """
    :returns: ground truth and one :class:`FrameDetections` per frame in
      ``[0, n_frames)``
    """
    rng = np.random.default_rng(config.seed)
    weights = np.asarray(config.defect_category_weights, dtype=float)
    weights = weights / weights.sum()
    v = config.belt_velocity

    spawned = []
    for object_id, (start, lane) in enumerate(_spawn_schedule(rng, config), 1):
        size = _draw_size(rng, config.box_size_mean, config.box_size_std)
        category = CategoryLabel(_draw_category(rng, config, weights), config.num_categories)
        spawned.append((object_id, start, lane, size, GroundTruthObject(object_id, category, lane=lane)))

    frames = []
    for t in range(config.n_frames):
        detections = []
        for object_id, start, lane, size, obj in spawned:
            if t <= start:
                break
            x = -size + v * (t - start)
            if x + size <= 0 or x >= config.frame_width:
                continue
            y = config.lane_spacing * (lane + 0.5) - size / 2.0
            true_box = BoundingBox(x, y, size, size)
            obj.boxes.append((t, true_box))

            if config.detection_dropout_prob > 0 and rng.random() < config.detection_dropout_prob:
                continue
            box = true_box
            if config.bbox_jitter_std > 0:
                dx, dy, dw, dh = rng.normal(0.0, config.bbox_jitter_std, 4)
                box = BoundingBox(x + dx, y + dy, max(size + dw, 1.0), max(size + dh, 1.0))
            score = _draw_score(rng, config.score_mean_true, config.score_std_true)
            observed = _observe(rng, obj.true_category.index, config)
            detections.append(Detection(t, box, score,
                                        CategoryLabel(observed, config.num_categories)))

        if config.false_positive_rate > 0:
            for _ in range(int(rng.poisson(config.false_positive_rate))):
                size = _draw_size(rng, config.box_size_mean, config.box_size_std)
                fx = float(rng.uniform(0.0, max(config.frame_width - size, 0.0)))
                fy = float(rng.uniform(0.0, max(config.frame_height - size, 0.0)))
                score = _draw_score(rng, config.score_mean_fp, config.score_std_fp)
                category = int(rng.integers(0, config.num_categories))
                detections.append(Detection(t, BoundingBox(fx, fy, size, size), score,
                                            CategoryLabel(category, config.num_categories)))
        frames.append(FrameDetections(t, detections))

    objects = [obj for _, _, _, _, obj in spawned if obj.boxes]
    logging.info("simulated %d frames, %d objects, %d detections (seed %d)",
                 config.n_frames, len(objects), sum(len(f) for f in frames), config.seed)
    return SceneGroundTruth(objects, config.n_frames), frames


def scene_statistics(gt: SceneGroundTruth) -> SceneStatistics:
    n = len(gt.objects)
    if n == 0:
        return SceneStatistics(0, 0, 0.0, 0.0)
    n_defect = sum(1 for obj in gt.objects if obj.true_binary == BinaryQuality.DEFECT)
    lifetimes = [obj.lifetime for obj in gt.objects]
    return SceneStatistics(n, n_defect, n_defect / float(n), float(np.mean(lifetimes)))
