import json
import pickle

import pytest

from beltrack.aggregation import PredictionBuffer, majority_vote
from beltrack.byte_tracker import run_tracker
from beltrack.conveyor_sim import SimConfig, generate_scene
from beltrack.core import BinaryQuality, BoundingBox, CategoryLabel
from beltrack.stream_io import (MalformedInput, ingest_detections,
                                ingest_ground_truth, ingest_mot,
                                ingest_verdicts, write_detections,
                                write_ground_truth, write_mot_tracks,
                                write_verdicts)


def write_lines(path, lines):
    path.write_text('\n'.join(lines) + '\n')
    return str(path)


def record(frame, x=0.0, w=40.0, score=0.9, category=0):
    return json.dumps({'frame': frame, 'x': x, 'y': 10.0, 'w': w, 'h': 40.0,
                       'score': score, 'category': category})


def test_three_line_file(tmp_path):
    path = write_lines(tmp_path / 'd.jsonl', [
        record(0, x=1.0, category=2),
        record(0, x=100.0, category=None),
        '',
        record(1, x=6.0, score=0.3),
    ])
    frames = ingest_detections(path)
    assert [f.frame_index for f in frames] == [0, 1]
    assert len(frames[0]) == 2
    first = frames[0].detections[0]
    assert first.box == BoundingBox(1.0, 10.0, 40.0, 40.0)
    assert first.category_observation == CategoryLabel(2)
    assert frames[0].detections[1].category_observation is None
    assert frames[1].detections[0].score == 0.3


def test_zero_width_names_the_line(tmp_path):
    path = write_lines(tmp_path / 'd.jsonl', [record(0), record(1), record(2, w=0.0)])
    with pytest.raises(MalformedInput) as info:
        ingest_detections(path)
    assert info.value.line_number == 3
    assert str(info.value).startswith('%s:3:' % path)


@pytest.mark.parametrize('line', [
    'not json',
    '[1, 2]',
    json.dumps({'frame': 0, 'x': 0.0, 'y': 0.0, 'w': 4.0, 'h': 4.0}),
    json.dumps({'frame': 0.5, 'x': 0.0, 'y': 0.0, 'w': 4.0, 'h': 4.0, 'score': 0.5}),
    json.dumps({'frame': 0, 'x': 'a', 'y': 0.0, 'w': 4.0, 'h': 4.0, 'score': 0.5}),
    json.dumps({'frame': 0, 'x': 0.0, 'y': 0.0, 'w': 4.0, 'h': 4.0, 'score': 1.5}),
    json.dumps({'frame': 0, 'x': 0.0, 'y': 0.0, 'w': 4.0, 'h': 4.0, 'score': 0.5,
                'category': 9}),
])
def test_malformed_lines(tmp_path, line):
    path = write_lines(tmp_path / 'd.jsonl', [record(0), line])
    with pytest.raises(MalformedInput) as info:
        ingest_detections(path)
    assert info.value.line_number == 2


def test_skip_malformed(tmp_path, caplog):
    path = write_lines(tmp_path / 'd.jsonl', [record(0), record(1, w=-1.0), record(2)])
    frames = ingest_detections(path, skip_malformed=True)
    assert [f.frame_index for f in frames] == [0, 2]
    assert 'skipping malformed line' in caplog.text


def undecodable_file(path):
    path.write_bytes(record(0).encode() + b'\n\xff\xfe\n' + record(2).encode() + b'\n')
    return str(path)


def test_undecodable_line_names_the_line(tmp_path):
    path = undecodable_file(tmp_path / 'd.jsonl')
    with pytest.raises(MalformedInput) as info:
        ingest_detections(path)
    assert info.value.line_number == 2


def test_skip_undecodable_line(tmp_path, caplog):
    frames = ingest_detections(undecodable_file(tmp_path / 'd.jsonl'), skip_malformed=True)
    assert [f.frame_index for f in frames] == [0, 2]
    assert 'skipping malformed line' in caplog.text


def test_out_of_order_frames_are_sorted(tmp_path, caplog):
    path = write_lines(tmp_path / 'd.jsonl', [record(3), record(1), record(3, x=50.0)])
    frames = ingest_detections(path)
    assert [f.frame_index for f in frames] == [1, 3]
    assert [d.box.x for d in frames[1].detections] == [0.0, 50.0]
    assert 'out of order' in caplog.text


def test_missing_file(tmp_path):
    with pytest.raises(IOError):
        ingest_detections(str(tmp_path / 'nope.jsonl'))


def test_malformed_input_pickles():
    ex = pickle.loads(pickle.dumps(MalformedInput('a.jsonl', 4, 'bad')))
    assert (ex.path, ex.line_number, ex.message) == ('a.jsonl', 4, 'bad')
    assert str(ex) == 'a.jsonl:4: bad'


def test_detections_survive_a_file(tmp_path):
    _, frames = generate_scene(SimConfig(seed=3, bbox_jitter_std=1.5, false_positive_rate=0.5,
                                         n_frames=60))
    path = str(tmp_path / 'scene.jsonl')
    write_detections(frames, path)
    nonempty = [f for f in frames if len(f)]
    assert ingest_detections(path) == nonempty


def test_ground_truth_file(tmp_path):
    gt, _ = generate_scene(SimConfig(seed=3, n_frames=80))
    path = str(tmp_path / 'truth.jsonl')
    write_ground_truth(gt, path)
    loaded = ingest_ground_truth(path)
    assert [o.object_id for o in loaded.objects] == [o.object_id for o in gt.objects]
    assert [o.boxes for o in loaded.objects] == [o.boxes for o in gt.objects]
    assert [o.true_category for o in loaded.objects] == [o.true_category for o in gt.objects]


def test_ground_truth_category_change(tmp_path):
    line = {'frame': 0, 'object_id': 1, 'x': 0.0, 'y': 0.0, 'w': 4.0, 'h': 4.0,
            'true_category': 0}
    path = write_lines(tmp_path / 't.jsonl', [
        json.dumps(line), json.dumps(dict(line, frame=1, true_category=2))])
    with pytest.raises(MalformedInput) as info:
        ingest_ground_truth(path)
    assert info.value.line_number == 2


def test_mot_input(tmp_path):
    path = write_lines(tmp_path / 'det.txt', [
        '1,-1,10,20,30,40,0.75,-1,-1,-1',
        '1,-1,100,20,30,40,-1,-1,-1,-1',
        '2,-1,12,20,30,40,0.5',
    ])
    frames = ingest_mot(path)
    assert [f.frame_index for f in frames] == [1, 2]
    assert [d.score for d in frames[0].detections] == [0.75, 1.0]
    assert frames[1].detections[0].box == BoundingBox(12.0, 20.0, 30.0, 40.0)
    assert frames[1].detections[0].category_observation is None


def test_mot_too_few_columns(tmp_path):
    path = write_lines(tmp_path / 'det.txt', ['1,-1,10,20,30,40'])
    with pytest.raises(MalformedInput):
        ingest_mot(path)


def test_mot_tracks_output(tmp_path):
    _, frames = generate_scene(SimConfig(n_frames=40, n_objects=2))
    _, tracks = run_tracker(frames)
    path = str(tmp_path / 'tracks.txt')
    write_mot_tracks(tracks, path)
    rows = [line.split(',') for line in open(path).read().splitlines()]
    assert len(rows) == sum(t.length for t in tracks)
    keys = [(int(r[0]), int(r[1])) for r in rows]
    assert keys == sorted(keys)


def test_verdict_file(tmp_path):
    buffers = [PredictionBuffer(3, [(0, CategoryLabel(1)), (1, CategoryLabel(1))]),
               PredictionBuffer(5, [(4, CategoryLabel(0))])]
    verdicts = [majority_vote(b) for b in buffers]
    path = str(tmp_path / 'v.jsonl')
    write_verdicts(verdicts, path)
    loaded = ingest_verdicts(path)
    assert loaded == verdicts
    assert loaded[0].final_binary == BinaryQuality.DEFECT
