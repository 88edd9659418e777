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
Detection stream -> tracks -> per-track votes -> video report.

Each frame goes through the tracker; every detection the tracker
attaches to a track and that carries a category observation is recorded
in that track's prediction buffer. Observations on detections no track
claims are dropped. At the end of the stream the buffers are voted and
the video is scored both frame by frame and after aggregation.
"""

import concurrent.futures
import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .aggregation import (PredictionBuffer, TrackVerdict, frame_wise_verdicts,
                          majority_vote, record_prediction)
from .byte_tracker import ByteTracker
from .config import InvalidConfig, PipelineConfig
from .conveyor_sim import SceneGroundTruth, SimConfig, generate_scene
from .core import BeltrackError, FrameDetections, Track
from .metrics import (MODES, UndefinedMetric, VideoQualityReport,
                      stability_report, temporal_stability)
from .stream_io import (ingest_detections, ingest_mot, write_mot_tracks,
                        write_summary, write_verdicts)

INPUT_FORMATS = ('jsonl', 'mot')


@dataclass
class PipelineRun:
    """
    One video's worth of work. Exactly one of ``input_path`` and
    ``sim_config`` must be given.

    :raises: :exc:`beltrack.config.InvalidConfig`
    """
    input_path: Optional[str] = None
    sim_config: Optional[SimConfig] = None
    config: PipelineConfig = field(default_factory=PipelineConfig)
    input_format: str = 'jsonl'
    skip_malformed: bool = False
    verdicts_path: Optional[str] = None
    summary_path: Optional[str] = None
    tracks_path: Optional[str] = None

    def __post_init__(self):
        if (self.input_path is None) == (self.sim_config is None):
            raise InvalidConfig("a pipeline run needs exactly one of an input file "
                                "and a simulator config")
        if self.input_format not in INPUT_FORMATS:
            raise InvalidConfig("input format must be one of %s, got %r" %
                                (INPUT_FORMATS, self.input_format))

    @property
    def source(self) -> str:
        if self.input_path is not None:
            return self.input_path
        return 'simulator(seed=%d)' % self.sim_config.seed


@dataclass
class PipelineResult:
    verdicts: List[TrackVerdict]
    # mode -> report, None when no track carried a prediction
    reports: Dict[str, Optional[VideoQualityReport]]
    tracks: List[Track] = field(default_factory=list)
    buffers: List[PredictionBuffer] = field(default_factory=list)
    n_frames: int = 0
    # streaming mode only: (frame_index, running verdict) per recorded prediction
    running: List[Tuple[int, TrackVerdict]] = field(default_factory=list)
    ground_truth: Optional[SceneGroundTruth] = None

    def summary(self):
        d = dict((mode, None if r is None else r.to_dict()) for mode, r in self.reports.items())
        d['n_frames'] = self.n_frames
        d['n_tracks'] = len(self.tracks)
        d['n_verdicts'] = len(self.verdicts)
        return d


def fill_frame_gaps(frames: Sequence[FrameDetections]) -> List[FrameDetections]:
    """
    Insert empty frames for indices missing between the first and last
    frame present.
    """
    if not frames:
        return []
    by_index = dict((f.frame_index, f) for f in frames)
    first, last = min(by_index), max(by_index)
    return [by_index.get(t, FrameDetections(t)) for t in range(first, last + 1)]


def load_frames(run: PipelineRun):
    """
    :returns: (frames, ground truth or ``None``)
    """
    if run.sim_config is not None:
        gt, frames = generate_scene(run.sim_config)
        return frames, gt
    num_categories = run.config.aggregation.num_categories
    if run.input_format == 'mot':
        frames = ingest_mot(run.input_path, run.skip_malformed)
    else:
        frames = ingest_detections(run.input_path, run.skip_malformed, num_categories)
    return fill_frame_gaps(frames), None


def track_frames(frames, config: PipelineConfig):
    """
    Run the tracker over ``frames`` and route category observations into
    per-track buffers.

    :returns: (finalized tracks, buffers keyed by track id, running verdicts)
    """
    tracker = ByteTracker(config.tracker, config.kalman)
    num_categories = config.aggregation.num_categories
    buffers = {}
    running = []
    for frame in frames:
        output = tracker.step(frame)
        for track_id, j in output.matches:
            label = frame.detections[j].category_observation
            if label is None:
                continue
            if track_id not in buffers:
                buffers[track_id] = PredictionBuffer(track_id, num_categories=num_categories)
            record_prediction(buffers[track_id], frame.frame_index, label)
            if config.aggregation.streaming:
                running.append((frame.frame_index,
                                majority_vote(buffers[track_id], config.aggregation)))
    tracks = tracker.finalize()
    for track in tracks:
        if track.id in buffers:
            track.predictions = list(buffers[track.id].entries)
    return tracks, buffers, running


def score_frames(frames: Sequence[FrameDetections], config: PipelineConfig,
                 source: str = 'frames',
                 ground_truth: Optional[SceneGroundTruth] = None) -> PipelineResult:
    """
    Track, vote and build the stability reports for frames already in
    memory; nothing is written.
    """
    tracks, buffers, running = track_frames(frames, config)

    voted = [buffers[t.id] for t in tracks if t.id in buffers and len(buffers[t.id])]
    verdicts = []
    for buf in voted:
        verdict = majority_vote(buf, config.aggregation)
        if config.metrics.stability_labels == 'category':
            labels = [label.index for label in buf.labels]
        else:
            labels = frame_wise_verdicts(buf)
        verdicts.append(dataclasses.replace(verdict, stability_frame_wise=temporal_stability(labels)))

    reports = {}
    for mode in MODES:
        try:
            reports[mode] = stability_report(voted, mode, config.aggregation, config.metrics)
        except UndefinedMetric as ex:
            logging.warning("%s: no %s report: %s", source, mode, ex)
            reports[mode] = None

    logging.info("%s: %d frames, %d tracks, %d verdicts", source,
                 len(frames), len(tracks), len(verdicts))
    return PipelineResult(verdicts=verdicts, reports=reports, tracks=tracks,
                          buffers=voted, n_frames=len(frames), running=running,
                          ground_truth=ground_truth)


def run_pipeline(run: PipelineRun) -> PipelineResult:
    """
    :raises: :exc:`beltrack.stream_io.MalformedInput`,
      :exc:`beltrack.core.BeltrackError` subclasses from the stages
    """
    frames, gt = load_frames(run)
    result = score_frames(frames, run.config, run.source, gt)

    if run.verdicts_path:
        write_verdicts(result.verdicts, run.verdicts_path)
    if run.summary_path:
        write_summary(result.summary(), run.summary_path)
    if run.tracks_path:
        write_mot_tracks(result.tracks, run.tracks_path)
    return result


def _run_isolated(run):
    try:
        return run_pipeline(run), None
    except (BeltrackError, IOError) as ex:
        return None, ex


def run_many(runs: Sequence[PipelineRun], jobs: int = 1):
    """
    Run several independent pipelines, in a process pool when ``jobs > 1``.
    A failing run does not stop the others.

    :returns: list of ``(run, result or None, exception or None)`` in the
      order of ``runs``
    """
    if jobs <= 1 or len(runs) <= 1:
        outcomes = [_run_isolated(run) for run in runs]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as executor:
            outcomes = list(executor.map(_run_isolated, runs))
    for run, (_, error) in zip(runs, outcomes):
        if error is not None:
            logging.error("%s failed: %s", run.source, error)
    return [(run, result, error) for run, (result, error) in zip(runs, outcomes)]
