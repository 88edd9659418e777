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
Readers and writers for the on-disk formats:

* detection JSON Lines, one detection per line::

    {"frame": 0, "x": 1.0, "y": 2.0, "w": 40.0, "h": 40.0, "score": 0.9, "category": 2}

  ``category`` may be ``null`` (no classifier output for the box);
* ground-truth JSON Lines, one visible object per frame, with
  ``object_id`` and ``true_category`` instead of ``score``/``category``;
* verdict JSON Lines written by ``beltrack track``;
* MOT-challenge text (``frame,id,x,y,w,h,score,...``), which carries no
  category.
"""

import json
import logging
import os
from typing import List

from .aggregation import TrackVerdict
from .conveyor_sim import GroundTruthObject, SceneGroundTruth
from .core import (DEFAULT_NUM_CATEGORIES, BeltrackError, BinaryQuality,
                   BoundingBox, CategoryLabel, Detection, FrameDetections)


class MalformedInput(BeltrackError):

    def __init__(self, path, line_number, message):
        BeltrackError.__init__(self, path, line_number, message)
        self.path = path
        self.line_number = line_number
        self.message = message

    def __str__(self):
        return "%s:%d: %s" % (self.path, self.line_number, self.message)


def _records(path, parse_line, skip_malformed):
    """
    Yield ``(line_number, parse_line(text))`` for every non-blank line.
    Any exception raised while decoding or parsing a line becomes
    :exc:`MalformedInput`.
    """
    if not os.path.isfile(path):
        raise IOError("input file [%s] does not exist" % path)
    with open(path, 'rb') as f:
        for line_number, raw in enumerate(f, 1):
            try:
                text = raw.decode('utf-8').strip()
                record = parse_line(text) if text else None
            except (ValueError, KeyError, TypeError) as ex:
                if not skip_malformed:
                    raise MalformedInput(path, line_number, str(ex))
                logging.warning("skipping malformed line %s:%d: %s", path, line_number, ex)
                continue
            if text:
                yield line_number, record


def _number(record, key):
    value = record[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError("field '%s' is not a number: %r" % (key, value))
    return value


def _integer(record, key):
    value = record[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError("field '%s' is not an integer: %r" % (key, value))
    return value


def _box(record):
    return BoundingBox(_number(record, 'x'), _number(record, 'y'),
                       _number(record, 'w'), _number(record, 'h'))


def _group(detections, path):
    """
    Group detections by frame in ascending frame order, keeping file
    order within a frame.
    """
    frames = {}
    last = None
    out_of_order = False
    for d in detections:
        if last is not None and d.frame_index < last:
            out_of_order = True
        last = d.frame_index
        frames.setdefault(d.frame_index, []).append(d)
    if out_of_order:
        logging.warning("frames in %s are out of order; sorted in memory", path)
    return [FrameDetections(f, frames[f]) for f in sorted(frames)]


def ingest_detections(path, skip_malformed=False,
                      num_categories=DEFAULT_NUM_CATEGORIES) -> List[FrameDetections]:
    """
    Parse a detection JSONL file into frames. Only frames with at least
    one detection are returned.

    :raises: :exc:`MalformedInput` naming the offending line, unless
      ``skip_malformed`` is set
    """
    def parse(text):
        record = json.loads(text)
        if not isinstance(record, dict):
            raise TypeError("expected a JSON object, got %r" % (record,))
        category = record.get('category')
        if category is not None:
            category = CategoryLabel(_integer(record, 'category'), num_categories)
        return Detection(_integer(record, 'frame'), _box(record),
                         _number(record, 'score'), category)

    detections = [d for _, d in _records(path, parse, skip_malformed)]
    frames = _group(detections, path)
    logging.info("read %d detections over %d frames from %s",
                 len(detections), len(frames), path)
    return frames


def detection_record(d: Detection):
    return {'frame': d.frame_index,
            'x': d.box.x, 'y': d.box.y, 'w': d.box.w, 'h': d.box.h,
            'score': d.score,
            'category': None if d.category_observation is None else d.category_observation.index}


def write_detections(frames, path):
    with open(path, 'w') as f:
        for frame in frames:
            for d in frame.detections:
                f.write(json.dumps(detection_record(d)) + '\n')


def ingest_mot(path, skip_malformed=False) -> List[FrameDetections]:
    """
    Read MOT-challenge text ``frame,id,x,y,w,h,score,...``. A negative
    score (the format's "unknown") reads as 1.0; the id column is ignored.

    :raises: :exc:`MalformedInput`
    """
    def parse(text):
        cols = [c.strip() for c in text.split(',')]
        if len(cols) < 7:
            raise ValueError("expected at least 7 columns, got %d" % len(cols))
        score = float(cols[6])
        if score < 0:
            score = 1.0
        return Detection(int(cols[0]),
                         BoundingBox(float(cols[2]), float(cols[3]), float(cols[4]), float(cols[5])),
                         score)

    detections = [d for _, d in _records(path, parse, skip_malformed)]
    return _group(detections, path)


def write_mot_tracks(tracks, path):
    """
    Track histories as MOT-challenge result lines, sorted by frame then id.
    """
    rows = sorted((f, t.id, box) for t in tracks for f, box in t.history)
    with open(path, 'w') as f:
        for frame_index, track_id, box in rows:
            f.write('%d,%d,%r,%r,%r,%r,1,-1,-1,-1\n' % (frame_index, track_id,
                                                     box.x, box.y, box.w, box.h))


def ingest_ground_truth(path, num_categories=DEFAULT_NUM_CATEGORIES) -> SceneGroundTruth:
    """
    :raises: :exc:`MalformedInput`, also when an object changes category
    """
    def parse(text):
        record = json.loads(text)
        return (_integer(record, 'object_id'), _integer(record, 'frame'),
                _integer(record, 'true_category'), _box(record))

    objects = {}
    last_frame = -1
    for line_number, (object_id, frame_index, category, box) in _records(path, parse, False):
        last_frame = max(last_frame, frame_index)
        if object_id not in objects:
            try:
                label = CategoryLabel(category, num_categories)
            except ValueError as ex:
                raise MalformedInput(path, line_number, str(ex))
            objects[object_id] = GroundTruthObject(object_id, label)
        obj = objects[object_id]
        if obj.true_category.index != category:
            raise MalformedInput(path, line_number, "object %d changes category %d -> %d" %
                                 (object_id, obj.true_category.index, category))
        obj.boxes.append((frame_index, box))
    for obj in objects.values():
        obj.boxes.sort(key=lambda fb: fb[0])
    return SceneGroundTruth([objects[k] for k in sorted(objects)], last_frame + 1)


def write_ground_truth(gt: SceneGroundTruth, path):
    rows = sorted((f, obj.object_id, obj.true_category.index, box)
                  for obj in gt.objects for f, box in obj.boxes)
    with open(path, 'w') as f:
        for frame_index, object_id, category, box in rows:
            f.write(json.dumps({'frame': frame_index, 'object_id': object_id,
                                'x': box.x, 'y': box.y, 'w': box.w, 'h': box.h,
                                'true_category': category}) + '\n')


def write_scene(gt: SceneGroundTruth, frames, detections_path, truth_path):
    write_detections(frames, detections_path)
    write_ground_truth(gt, truth_path)


def verdict_record(v: TrackVerdict):
    return {'track_id': v.track_id,
            'category': v.final_category.index,
            'binary': str(v.final_binary),
            'k': v.k,
            'votes': list(v.vote_counts),
            'stability_frame_wise': v.stability_frame_wise}


def write_verdicts(verdicts, path):
    with open(path, 'w') as f:
        for v in verdicts:
            f.write(json.dumps(verdict_record(v)) + '\n')


def ingest_verdicts(path) -> List[TrackVerdict]:
    """
    :raises: :exc:`MalformedInput`
    """
    def parse(text):
        record = json.loads(text)
        votes = tuple(int(c) for c in record['votes'])
        category = CategoryLabel(_integer(record, 'category'), len(votes))
        binary = BinaryQuality(record['binary'])
        stability = record.get('stability_frame_wise')
        return TrackVerdict(track_id=_integer(record, 'track_id'),
                            final_category=category,
                            final_binary=binary,
                            vote_counts=votes,
                            track_length=_integer(record, 'k'),
                            stability_frame_wise=None if stability is None else float(stability))

    return [v for _, v in _records(path, parse, False)]


def write_summary(summary, path):
    with open(path, 'w') as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write('\n')
