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
Shared vocabulary for the inspection pipeline: boxes, detections,
frames, quality categories and tracks.
"""

import enum
import math
import numbers
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

DEFAULT_NUM_CATEGORIES = 4

# index 0 must stay 'fresh', the binary collapse depends on it
CATEGORY_NAMES = ('fresh', 'bruise_defect', 'rot_defect', 'scab_defect')
FRESH, BRUISE_DEFECT, ROT_DEFECT, SCAB_DEFECT = range(4)


class BeltrackError(Exception):
    pass


class InvalidBox(BeltrackError, ValueError):
    pass


class InvalidLabel(BeltrackError, ValueError):
    pass


class OutOfOrderFrame(BeltrackError):
    pass


class InvalidDetection(BeltrackError, ValueError):
    pass


@dataclass(frozen=True)
class BoundingBox:
    """
    Axis-aligned box in pixels, top-left corner plus width and height.

    :raises: :exc:`InvalidBox` for non-finite coordinates or a
      non-positive width/height
    """
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        for name in ('x', 'y', 'w', 'h'):
            value = getattr(self, name)
            if not isinstance(value, numbers.Real) or isinstance(value, bool):
                raise InvalidBox("box field '%s' is not a number: %r" % (name, value))
            if not math.isfinite(value):
                raise InvalidBox("box field '%s' is not finite: %r" % (name, value))
        if self.w <= 0 or self.h <= 0:
            raise InvalidBox("degenerate box (w=%r, h=%r)" % (self.w, self.h))

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def center(self) -> Tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    def to_xyxy(self) -> Tuple[float, float, float, float]:
        return (self.x, self.y, self.x + self.w, self.y + self.h)

    def translated(self, dx: float, dy: float = 0.0) -> 'BoundingBox':
        return BoundingBox(self.x + dx, self.y + dy, self.w, self.h)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """
    Intersection over union of two boxes, in [0, 1].
    """
    if a == b:
        return 1.0
    ix = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    iy = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = a.area + b.area - inter
    return min(1.0, inter / union)


@dataclass(frozen=True)
class CategoryLabel:
    index: int
    num_categories: int = DEFAULT_NUM_CATEGORIES

    def __post_init__(self):
        if self.num_categories < 2:
            raise InvalidLabel("need at least two categories, got %d" % self.num_categories)
        if not 0 <= self.index < self.num_categories:
            raise InvalidLabel("category %r outside [0, %d)" % (self.index, self.num_categories))

    def __int__(self):
        return self.index

    @property
    def name(self) -> str:
        if self.num_categories == len(CATEGORY_NAMES):
            return CATEGORY_NAMES[self.index]
        return 'category_%d' % self.index


class BinaryQuality(enum.Enum):
    NORMAL = 'normal'
    DEFECT = 'defect'

    def __str__(self):
        return self.value


def to_binary(label) -> BinaryQuality:
    """
    Collapse a category (a :class:`CategoryLabel` or a bare index) to
    normal/defect. Only category 0 ('fresh') is normal.
    """
    index = label.index if isinstance(label, CategoryLabel) else int(label)
    if index < 0:
        raise InvalidLabel("negative category index %d" % index)
    return BinaryQuality.NORMAL if index == FRESH else BinaryQuality.DEFECT


@dataclass(frozen=True)
class Detection:
    frame_index: int
    box: BoundingBox
    score: float
    category_observation: Optional[CategoryLabel] = None

    def __post_init__(self):
        if self.frame_index < 0:
            raise InvalidDetection("negative frame index %d" % self.frame_index)
        if not 0.0 <= self.score <= 1.0:
            raise InvalidDetection("detection score %r outside [0, 1]" % self.score)


@dataclass(frozen=True)
class FrameDetections:
    frame_index: int
    detections: Tuple[Detection, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'detections', tuple(self.detections))
        for d in self.detections:
            if d.frame_index != self.frame_index:
                raise InvalidDetection("detection for frame %d filed under frame %d" %
                                       (d.frame_index, self.frame_index))

    def __len__(self):
        return len(self.detections)


class TrackStatus(enum.Enum):
    TENTATIVE = 'tentative'
    ACTIVE = 'active'
    LOST = 'lost'
    REMOVED = 'removed'


@dataclass
class Track:
    """
    One object's identity over the video. Only the tracker mutates it.

    ``history`` holds the matched detection box for every frame the track
    was updated on; its length is the track length k.
    """
    id: int
    state: object
    status: TrackStatus
    history: List[Tuple[int, BoundingBox]] = field(default_factory=list)
    predictions: List[Tuple[int, CategoryLabel]] = field(default_factory=list)
    last_update_frame: int = -1
    hit_count: int = 0

    @property
    def length(self) -> int:
        return len(self.history)

    @property
    def start_frame(self) -> int:
        return self.history[0][0] if self.history else -1

    def box_at(self, frame_index: int) -> Optional[BoundingBox]:
        for f, box in reversed(self.history):
            if f == frame_index:
                return box
            if f < frame_index:
                break
        return None
