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
Per-track prediction buffers and the track-level majority vote.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .core import (DEFAULT_NUM_CATEGORIES, FRESH, BeltrackError,
                   BinaryQuality, CategoryLabel, InvalidLabel,
                   OutOfOrderFrame, to_binary)

PREFER_DEFECT = 'prefer_defect'
LOWEST_INDEX = 'lowest_index'
TIE_BREAKS = (PREFER_DEFECT, LOWEST_INDEX)

VOTE_THEN_COLLAPSE = 'vote_then_collapse'
COLLAPSE_THEN_VOTE = 'collapse_then_vote'
ORDERS = (VOTE_THEN_COLLAPSE, COLLAPSE_THEN_VOTE)


class EmptyBuffer(BeltrackError):
    pass


@dataclass(frozen=True)
class AggregationConfig:
    num_categories: int = DEFAULT_NUM_CATEGORIES
    tie_break: str = PREFER_DEFECT
    order: str = VOTE_THEN_COLLAPSE
    streaming: bool = False

    def __post_init__(self):
        if self.num_categories < 2:
            raise ValueError("num_categories must be >= 2, got %r" % self.num_categories)
        if self.tie_break not in TIE_BREAKS:
            raise ValueError("tie_break must be one of %s, got %r" % (TIE_BREAKS, self.tie_break))
        if self.order not in ORDERS:
            raise ValueError("order must be one of %s, got %r" % (ORDERS, self.order))


DEFAULT_AGGREGATION_CONFIG = AggregationConfig()


@dataclass
class PredictionBuffer:
    track_id: int
    entries: List[Tuple[int, CategoryLabel]] = field(default_factory=list)
    num_categories: int = DEFAULT_NUM_CATEGORIES

    def __post_init__(self):
        entries, self.entries = self.entries, []
        for frame_index, label in entries:
            record_prediction(self, frame_index, label)

    def __len__(self):
        return len(self.entries)

    @property
    def labels(self) -> List[CategoryLabel]:
        return [label for _, label in self.entries]

    @property
    def last_frame(self) -> Optional[int]:
        return self.entries[-1][0] if self.entries else None


@dataclass(frozen=True)
class TrackVerdict:
    track_id: int
    final_category: CategoryLabel
    final_binary: BinaryQuality
    vote_counts: Tuple[int, ...]
    track_length: int
    # filled in by the pipeline
    stability_frame_wise: Optional[float] = None

    @property
    def k(self) -> int:
        return self.track_length


def record_prediction(buffer: PredictionBuffer, frame_index: int,
                      label: CategoryLabel) -> PredictionBuffer:
    """
    Append ``label`` observed at ``frame_index``; the buffer is updated in
    place and returned.

    :raises: :exc:`OutOfOrderFrame` unless ``frame_index`` is past the last
      recorded frame, :exc:`InvalidLabel` for a category outside the
      buffer's category count
    """
    if buffer.entries and frame_index <= buffer.entries[-1][0]:
        raise OutOfOrderFrame("track %s: prediction for frame %d after frame %d" %
                              (buffer.track_id, frame_index, buffer.entries[-1][0]))
    if not isinstance(label, CategoryLabel):
        label = CategoryLabel(int(label), buffer.num_categories)
    if label.index >= buffer.num_categories:
        raise InvalidLabel("track %s: category %d outside [0, %d)" %
                           (buffer.track_id, label.index, buffer.num_categories))
    buffer.entries.append((frame_index, label))
    return buffer


def _vote_counts(labels, num_categories):
    return np.bincount([label.index for label in labels], minlength=num_categories)


def _pick(counts, tie_break):
    """
    Index of the winning category; ``counts`` must not be all zero.

    >>> _pick(np.array([1, 0, 1, 0]), PREFER_DEFECT)
    2
    >>> _pick(np.array([1, 0, 1, 0]), LOWEST_INDEX)
    0
    """
    tied = np.flatnonzero(counts == counts.max())
    if tie_break == PREFER_DEFECT:
        defects = tied[tied != FRESH]
        if len(defects):
            return int(defects[0])
    return int(tied[0])


def majority_vote(buffer: PredictionBuffer,
                  config: AggregationConfig = DEFAULT_AGGREGATION_CONFIG) -> TrackVerdict:
    """
    Most frequent category over the buffer.

    With ``collapse_then_vote`` the binary majority decides first and the
    category is the most frequent one on the winning side, so it need not
    hold the overall maximal count.

    :raises: :exc:`EmptyBuffer`
    """
    if not buffer.entries:
        raise EmptyBuffer("track %s has no predictions" % buffer.track_id)
    num_categories = max(buffer.num_categories, config.num_categories)
    counts = _vote_counts(buffer.labels, num_categories)

    if config.order == VOTE_THEN_COLLAPSE:
        winner = _pick(counts, config.tie_break)
    else:
        n_defect = int(counts[1:].sum())
        n_normal = int(counts[FRESH])
        defect_wins = n_defect > n_normal or (n_defect == n_normal and
                                              config.tie_break == PREFER_DEFECT)
        if defect_wins:
            masked = counts.copy()
            masked[FRESH] = 0
            winner = _pick(masked, LOWEST_INDEX)
        else:
            winner = FRESH

    final = CategoryLabel(winner, num_categories)
    return TrackVerdict(track_id=buffer.track_id,
                        final_category=final,
                        final_binary=to_binary(final),
                        vote_counts=tuple(int(c) for c in counts),
                        track_length=len(buffer.entries))


def frame_wise_verdicts(buffer: PredictionBuffer) -> List[BinaryQuality]:
    """
    :raises: :exc:`EmptyBuffer`
    """
    if not buffer.entries:
        raise EmptyBuffer("track %s has no predictions" % buffer.track_id)
    return [to_binary(label) for label in buffer.labels]


def running_verdicts(buffer: PredictionBuffer,
                     config: AggregationConfig = DEFAULT_AGGREGATION_CONFIG) -> List[TrackVerdict]:
    """
    The running majority after each entry, for live displays. The last
    element equals ``majority_vote(buffer, config)``.

    :raises: :exc:`EmptyBuffer`
    """
    if not buffer.entries:
        raise EmptyBuffer("track %s has no predictions" % buffer.track_id)
    verdicts = []
    prefix = PredictionBuffer(buffer.track_id, num_categories=buffer.num_categories)
    for frame_index, label in buffer.entries:
        record_prediction(prefix, frame_index, label)
        verdicts.append(majority_vote(prefix, config))
    return verdicts
