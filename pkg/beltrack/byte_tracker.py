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
Two-stage (BYTE) association of per-frame detections into persistent
tracks.

High-score detections are matched first against Active and Lost tracks;
Active tracks left over then get a second chance against low-score
detections, which keeps tracks alive through blur and partial occlusion
without ever spawning a track from a low-score box.
"""

import logging
from dataclasses import dataclass, field, fields
from typing import List, Optional, Tuple

from .assignment import build_cost_matrix, solve_assignment
from .core import (BeltrackError, BoundingBox, FrameDetections,
                   OutOfOrderFrame, Track, TrackStatus)
from .kalman_filter import (DEFAULT_KALMAN_CONFIG, FilterDivergence,
                            KalmanConfig, KalmanState, kf_initiate,
                            kf_predict, kf_update, state_to_box)


class InvalidTrackerConfig(BeltrackError, ValueError):
    pass


@dataclass(frozen=True)
class TrackerConfig:
    """
    :raises: :exc:`InvalidTrackerConfig` when a threshold leaves [0, 1],
      the score thresholds are inverted or a frame count is too small
    """
    high_score_threshold: float = 0.6
    low_score_threshold: float = 0.1
    match_threshold_first: float = 0.8
    match_threshold_second: float = 0.5
    # None means high_score_threshold
    new_track_min_score: Optional[float] = None
    max_frames_lost: int = 30
    min_hits_to_activate: int = 1
    min_track_length_report: int = 1

    def __post_init__(self):
        for name in ('high_score_threshold', 'low_score_threshold',
                     'match_threshold_first', 'match_threshold_second'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidTrackerConfig("%s must be in [0, 1], got %r" % (name, value))
        if self.new_track_min_score is not None and not 0.0 <= self.new_track_min_score <= 1.0:
            raise InvalidTrackerConfig("new_track_min_score must be in [0, 1], got %r" %
                                       self.new_track_min_score)
        if self.low_score_threshold > self.high_score_threshold:
            raise InvalidTrackerConfig("low_score_threshold %r exceeds high_score_threshold %r" %
                                       (self.low_score_threshold, self.high_score_threshold))
        if self.max_frames_lost < 1:
            raise InvalidTrackerConfig("max_frames_lost must be >= 1, got %r" % self.max_frames_lost)
        if self.min_hits_to_activate < 1:
            raise InvalidTrackerConfig("min_hits_to_activate must be >= 1, got %r" %
                                       self.min_hits_to_activate)
        if self.min_track_length_report < 0:
            raise InvalidTrackerConfig("min_track_length_report must be >= 0, got %r" %
                                       self.min_track_length_report)

    @property
    def spawn_score(self) -> float:
        if self.new_track_min_score is None:
            return self.high_score_threshold
        return self.new_track_min_score

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


@dataclass
class TrackerOutput:
    frame_index: int
    active_tracks: List[Tuple[int, BoundingBox]] = field(default_factory=list)
    newly_removed_track_ids: List[int] = field(default_factory=list)
    # (track_id, index into the frame's detections)
    matches: List[Tuple[int, int]] = field(default_factory=list)


class ByteTracker(object):
    """
    Tracker for a single video stream. Not thread safe; feed frames in
    increasing ``frame_index`` order.
    """

    def __init__(self, config: TrackerConfig = TrackerConfig(),
                 kalman_config: KalmanConfig = DEFAULT_KALMAN_CONFIG):
        self.config = config
        self.kalman_config = kalman_config
        self._tracks = []
        self._next_id = 1
        self._last_frame = None

    @property
    def live_tracks(self) -> List[Track]:
        return [t for t in self._tracks if t.status != TrackStatus.REMOVED]

    def _predict(self, track, n_steps):
        state = track.state
        if track.status == TrackStatus.LOST:
            mean = state.mean.copy()
            mean[7] = 0.0
            state = KalmanState(mean, state.covariance)
        for _ in range(n_steps):
            state = kf_predict(state, self.kalman_config)
        track.state = state

    def _associate(self, tracks, dets, det_indices, max_cost):
        """
        :returns: (matched (track, det_index) pairs, unmatched tracks,
          unmatched det indices)
        """
        if not tracks or not det_indices:
            return [], list(tracks), list(det_indices)
        costs = build_cost_matrix([state_to_box(t.state) for t in tracks],
                                  [dets[j].box for j in det_indices])
        result = solve_assignment(costs, max_cost)
        matched = [(tracks[i], det_indices[j]) for i, j in result.matches]
        return (matched,
                [tracks[i] for i in result.unmatched_tracks],
                [det_indices[j] for j in result.unmatched_detections])

    def step(self, frame: FrameDetections) -> TrackerOutput:
        """
        Advance every live track to ``frame`` and associate its detections.

        :raises: :exc:`OutOfOrderFrame` if ``frame.frame_index`` is not
          greater than the previous frame's
        """
        cfg = self.config
        t = frame.frame_index
        if self._last_frame is not None and t <= self._last_frame:
            raise OutOfOrderFrame("frame %d after frame %d" % (t, self._last_frame))
        elapsed = 1 if self._last_frame is None else t - self._last_frame
        self._last_frame = t
        output = TrackerOutput(t)

        dets = frame.detections
        high = [j for j, d in enumerate(dets) if d.score >= cfg.high_score_threshold]
        low = [j for j, d in enumerate(dets)
               if cfg.low_score_threshold <= d.score < cfg.high_score_threshold]

        for track in self.live_tracks:
            self._predict(track, elapsed)
            try:
                state_to_box(track.state)
            except FilterDivergence as e:
                logging.warning("removing track %d at frame %d: %s", track.id, t, e)
                track.status = TrackStatus.REMOVED
                output.newly_removed_track_ids.append(track.id)

        live = self.live_tracks
        confirmed = [tr for tr in live if tr.status in (TrackStatus.ACTIVE, TrackStatus.LOST)]
        tentative = [tr for tr in live if tr.status == TrackStatus.TENTATIVE]

        first, unmatched_confirmed, remaining_high = self._associate(
            confirmed, dets, high, cfg.match_threshold_first)
        second_tent, unmatched_tentative, remaining_high = self._associate(
            tentative, dets, remaining_high, cfg.match_threshold_first)
        remaining_active = [tr for tr in unmatched_confirmed if tr.status == TrackStatus.ACTIVE]
        second, unmatched_active, _ = self._associate(
            remaining_active, dets, low, cfg.match_threshold_second)

        for track, j in first + second_tent + second:
            box = dets[j].box
            track.state = kf_update(track.state, box, self.kalman_config)
            track.history.append((t, box))
            track.hit_count += 1
            track.last_update_frame = t
            if track.status == TrackStatus.LOST:
                logging.debug("track %d re-found at frame %d", track.id, t)
                track.status = TrackStatus.ACTIVE
            elif (track.status == TrackStatus.TENTATIVE and
                  track.hit_count >= cfg.min_hits_to_activate):
                track.status = TrackStatus.ACTIVE
            output.matches.append((track.id, j))

        for track in unmatched_active:
            logging.debug("track %d lost at frame %d", track.id, t)
            track.status = TrackStatus.LOST
        for track in unmatched_tentative:
            logging.debug("tentative track %d dropped at frame %d", track.id, t)
            track.status = TrackStatus.REMOVED
            output.newly_removed_track_ids.append(track.id)
        for track in self._tracks:
            if (track.status == TrackStatus.LOST and
                    t - track.last_update_frame > cfg.max_frames_lost):
                logging.debug("track %d removed at frame %d", track.id, t)
                track.status = TrackStatus.REMOVED
                output.newly_removed_track_ids.append(track.id)

        for j in remaining_high:
            if dets[j].score < cfg.spawn_score:
                continue
            track = self._spawn(t, dets[j].box)
            output.matches.append((track.id, j))

        output.active_tracks = sorted(
            (track.id, state_to_box(track.state)) for track in self._tracks
            if track.last_update_frame == t and track.status == TrackStatus.ACTIVE)
        output.newly_removed_track_ids.sort()
        output.matches.sort()
        return output

    def _spawn(self, frame_index, box):
        status = TrackStatus.ACTIVE
        if self.config.min_hits_to_activate > 1:
            status = TrackStatus.TENTATIVE
        track = Track(id=self._next_id,
                      state=kf_initiate(box, self.kalman_config),
                      status=status,
                      history=[(frame_index, box)],
                      last_update_frame=frame_index,
                      hit_count=1)
        self._next_id += 1
        self._tracks.append(track)
        logging.debug("track %d spawned at frame %d", track.id, frame_index)
        return track

    def finalize(self) -> List[Track]:
        """
        All tracks ever created, Removed ones included, ordered by id and
        filtered to ``history`` length >= ``min_track_length_report``.
        """
        return [t for t in self._tracks
                if t.length >= self.config.min_track_length_report]


def run_tracker(frames, config: TrackerConfig = TrackerConfig(),
                kalman_config: KalmanConfig = DEFAULT_KALMAN_CONFIG):
    """
    Convenience loop over an iterable of :class:`FrameDetections`.

    :returns: (list of :class:`TrackerOutput`, finalized tracks)
    """
    tracker = ByteTracker(config, kalman_config)
    outputs = [tracker.step(f) for f in frames]
    return outputs, tracker.finalize()
