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
``beltrack`` command line: ``track``, ``simulate``, ``evaluate`` and
``report``.

Exit status is 0 on success, 1 for input errors and 2 for configuration
errors.
"""

from __future__ import print_function

import argparse
import json
import logging
import os
import sys
import typing
from dataclasses import MISSING, fields

from .byte_tracker import InvalidTrackerConfig
from .config import SECTIONS, InvalidConfig, load_config
from .conveyor_sim import InvalidSimConfig, generate_scene, scene_statistics
from .core import BeltrackError
from .metrics import (classification_metrics, count_id_switches,
                      detection_map, final_decisions, frame_wise_decisions,
                      match_tracks_to_objects, verdict_accuracy, UndefinedMetric)
from .pipeline import PipelineRun, fill_frame_gaps, run_many, score_frames
from .report import write_report
from .stream_io import (ingest_detections, ingest_ground_truth, ingest_verdicts,
                        write_scene)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_CONFIG_ERROR = 2

CONFIG_ERRORS = (InvalidConfig, InvalidTrackerConfig, InvalidSimConfig)

TRACKING_SECTIONS = ('kalman', 'tracker', 'aggregation', 'metrics')


def _parse_bool(text):
    """
    >>> _parse_bool('yes')
    True
    """
    value = text.strip().lower()
    if value in ('1', 'true', 'yes', 'on'):
        return True
    if value in ('0', 'false', 'no', 'off'):
        return False
    raise argparse.ArgumentTypeError("expected a boolean, got %r" % text)


def _flag_type(annotation):
    """
    :returns: (argparse type callable, nargs)
    """
    origin = typing.get_origin(annotation)
    args = typing.get_args(annotation)
    if origin is typing.Union:
        annotation = [a for a in args if a is not type(None)][0]
    elif origin is tuple:
        return args[0], '+'
    if annotation is bool:
        return _parse_bool, None
    return annotation, None


def add_config_flags(parser, sections):
    """
    One ``--field-name`` flag per field of each section's config
    dataclass. Flags default to unset so only explicit values reach
    :func:`collect_flag_values`.
    """
    for section in sections:
        group = parser.add_argument_group('%s options' % section)
        for f in fields(SECTIONS[section]):
            flag_type, nargs = _flag_type(f.type)
            default = f.default if f.default is not MISSING else None
            group.add_argument('--' + f.name.replace('_', '-'),
                               dest='%s.%s' % (section, f.name),
                               type=flag_type, nargs=nargs,
                               default=argparse.SUPPRESS,
                               help='(default: %s)' % (default,))


def collect_flag_values(args):
    values = {}
    for dest, value in vars(args).items():
        if '.' not in dest:
            continue
        section, name = dest.split('.', 1)
        values.setdefault(section, {})[name] = value
    return values


def parse_options(args=sys.argv[1:]):
    p = argparse.ArgumentParser(prog='beltrack',
                                description='Track, vote and score conveyor-belt inspection '
                                'streams.')
    p.add_argument('--config', default=None,
                   help='YAML config file (default: $BELTRACK_CONFIG).')
    p.add_argument('--verbose', '-v', action='store_true',
                   help='Log per-frame tracker decisions.')
    sub = p.add_subparsers(dest='verb')
    sub.required = True

    track = sub.add_parser('track', help='Track detection files and vote per track.')
    track.add_argument('inputs', nargs='+', help='Detection files.')
    track.add_argument('--format', dest='input_format', default='jsonl',
                       choices=['jsonl', 'mot'], help='Input format.')
    track.add_argument('--skip-malformed', action='store_true',
                       help='Skip malformed input lines instead of aborting.')
    track.add_argument('--output-dir', default='.',
                       help='Where verdict and summary files are written.')
    track.add_argument('--write-tracks', action='store_true',
                       help='Also write track boxes as MOT-challenge text.')
    track.add_argument('--jobs', type=int, default=1,
                       help='Worker processes for several input files.')
    add_config_flags(track, TRACKING_SECTIONS)

    simulate = sub.add_parser('simulate', help='Generate a synthetic scene.')
    simulate.add_argument('--output-dir', default='.')
    simulate.add_argument('--name', default='scene',
                          help='File name prefix (default: scene).')
    add_config_flags(simulate, ('simulator',))

    evaluate = sub.add_parser('evaluate', help='Score a detection file against ground truth.')
    evaluate.add_argument('detections', help='Detection JSONL file.')
    evaluate.add_argument('truth', help='Ground-truth JSONL file.')
    evaluate.add_argument('--output', default=None, help='Also write the scores as JSON.')
    add_config_flags(evaluate, TRACKING_SECTIONS)

    report = sub.add_parser('report', help='CSV and HTML summaries of verdict files.')
    report.add_argument('verdicts', nargs='+', help='Verdict JSONL files.')
    report.add_argument('--output-dir', default='.')

    return p.parse_args(args)


def _stem(path):
    return os.path.splitext(os.path.basename(path))[0]


def do_track(args, config):
    if not os.path.isdir(args.output_dir):
        os.makedirs(args.output_dir)
    runs = []
    for path in args.inputs:
        out = os.path.join(args.output_dir, _stem(path))
        runs.append(PipelineRun(input_path=path, config=config,
                                input_format=args.input_format,
                                skip_malformed=args.skip_malformed,
                                verdicts_path=out + '.verdicts.jsonl',
                                summary_path=out + '.summary.json',
                                tracks_path=out + '.tracks.txt' if args.write_tracks else None))
    status = EXIT_OK
    for run, result, error in run_many(runs, args.jobs):
        if error is not None:
            print('%s: %s' % (run.source, error), file=sys.stderr)
            status = EXIT_CONFIG_ERROR if isinstance(error, CONFIG_ERRORS) else EXIT_INPUT_ERROR
            continue
        print('Wrote %d verdicts to %s' % (len(result.verdicts), run.verdicts_path))
    return status


def do_simulate(args, config):
    if not os.path.isdir(args.output_dir):
        os.makedirs(args.output_dir)
    gt, frames = generate_scene(config.simulator)
    prefix = os.path.join(args.output_dir, args.name)
    detections_path = prefix + '.detections.jsonl'
    truth_path = prefix + '.truth.jsonl'
    write_scene(gt, frames, detections_path, truth_path)
    stats = scene_statistics(gt)
    print('Wrote %d objects (%d defect) over %d frames to %s and %s' %
          (stats.n_objects, stats.n_defect, len(frames), detections_path, truth_path))
    return EXIT_OK


def _optional(fn, *args):
    try:
        return fn(*args)
    except UndefinedMetric as ex:
        logging.warning("%s", ex)
        return None


def evaluate(detections_path, truth_path, config):
    """
    :returns: dict of detection, tracking and classification scores
    """
    num_categories = config.aggregation.num_categories
    gt = ingest_ground_truth(truth_path, num_categories)
    frames = fill_frame_gaps(ingest_detections(detections_path, num_categories=num_categories))
    result = score_frames(frames, config, detections_path)

    mapping = match_tracks_to_objects(result.tracks, gt, config.metrics.id_switch_iou)
    truth = dict((obj.object_id, obj.true_binary) for obj in gt.objects)
    aggregated = final_decisions(result.verdicts)
    frame_wise = frame_wise_decisions(result.buffers, config.metrics)
    scored = sorted(tid for tid in aggregated if tid in mapping)
    scores = {
        'detection_map': _optional(detection_map, frames, gt.as_frames(),
                                   list(config.metrics.map_iou_thresholds)),
        'id_switches': count_id_switches(result.tracks, gt, config.metrics.id_switch_iou),
        'n_tracks': len(result.tracks),
        'n_objects': len(gt.objects),
        'accuracy_aggregated': _optional(verdict_accuracy, aggregated, gt, mapping),
        'accuracy_frame_wise': _optional(verdict_accuracy, frame_wise, gt, mapping),
    }
    if scored:
        pred = [aggregated[tid] for tid in scored]
        true = [truth[mapping[tid]] for tid in scored]
        scores['classification_aggregated'] = classification_metrics(pred, true)._asdict()
    return scores


def do_evaluate(args, config):
    scores = evaluate(args.detections, args.truth, config)
    text = json.dumps(scores, indent=2, sort_keys=True)
    print(text)
    if args.output:
        with open(args.output, 'w') as f:
            f.write(text + '\n')
    return EXIT_OK


def do_report(args, config):
    if not os.path.isdir(args.output_dir):
        os.makedirs(args.output_dir)
    for path in args.verdicts:
        verdicts = ingest_verdicts(path)
        out = os.path.join(args.output_dir, _stem(path))
        summary = write_report(verdicts, out + '.csv', out + '.html', title=_stem(path))
        print('%s: %d tracks, defect ratio %s, mean frame-wise stability %s' %
              (path, summary['n_tracks'], summary['defect_ratio_text'],
               summary['mean_stability_text']))
        print('Generated %s.csv and %s.html' % (out, out))
    return EXIT_OK


VERBS = {
    'track': do_track,
    'simulate': do_simulate,
    'evaluate': do_evaluate,
    'report': do_report,
}


def main(args=sys.argv[1:]):
    options = parse_options(args)
    logging.basicConfig(level=logging.DEBUG if options.verbose else logging.INFO,
                        format='%(levelname)s: %(message)s')
    try:
        config = load_config(options.config, collect_flag_values(options))
        return VERBS[options.verb](options, config)
    except CONFIG_ERRORS as ex:
        print('config error: %s' % ex, file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (BeltrackError, IOError) as ex:
        print('input error: %s' % ex, file=sys.stderr)
        return EXIT_INPUT_ERROR
