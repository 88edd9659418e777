import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from beltrack.core import (BeltrackError, BinaryQuality, BoundingBox,
                           CategoryLabel, Detection, FrameDetections,
                           InvalidBox, InvalidDetection, InvalidLabel, Track,
                           TrackStatus, iou, to_binary)

coords = st.floats(min_value=-500, max_value=500, allow_nan=False)
sizes = st.floats(min_value=0.01, max_value=300, allow_nan=False)
boxes = st.builds(BoundingBox, coords, coords, sizes, sizes)


def pixel_iou(a, b):
    """Count shared unit pixels of two integer boxes on a raster."""
    canvas_a = np.zeros((200, 200), dtype=bool)
    canvas_b = np.zeros((200, 200), dtype=bool)
    canvas_a[a.y:a.y + a.h, a.x:a.x + a.w] = True
    canvas_b[b.y:b.y + b.h, b.x:b.x + b.w] = True
    inter = np.count_nonzero(canvas_a & canvas_b)
    union = np.count_nonzero(canvas_a | canvas_b)
    return inter / float(union)


def test_iou_examples():
    assert iou(BoundingBox(0, 0, 2, 2), BoundingBox(0, 0, 2, 2)) == 1.0
    assert iou(BoundingBox(0, 0, 1, 1), BoundingBox(5, 5, 1, 1)) == 0.0
    assert iou(BoundingBox(0, 0, 2, 2), BoundingBox(1, 0, 2, 2)) == pytest.approx(1 / 3.0, abs=1e-15)


def test_iou_touching_edges_is_zero():
    assert iou(BoundingBox(0, 0, 2, 2), BoundingBox(2, 0, 2, 2)) == 0.0


def test_iou_matches_pixel_oracle():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        a = BoundingBox(*(int(v) for v in np.r_[rng.integers(0, 128, 2), rng.integers(1, 65, 2)]))
        b = BoundingBox(*(int(v) for v in np.r_[rng.integers(0, 128, 2), rng.integers(1, 65, 2)]))
        assert abs(iou(a, b) - pixel_iou(a, b)) < 1e-12


@given(boxes, boxes)
def test_iou_symmetric_and_bounded(a, b):
    assert iou(a, b) == iou(b, a)
    assert 0.0 <= iou(a, b) <= 1.0


@given(boxes)
def test_iou_self_is_one(a):
    assert iou(a, a) == 1.0


@pytest.mark.parametrize('args', [
    (0, 0, 0, 1),
    (0, 0, 1, -1),
    (math.nan, 0, 1, 1),
    (0, math.inf, 1, 1),
    ('0', 0, 1, 1),
])
def test_degenerate_boxes_rejected(args):
    with pytest.raises(InvalidBox):
        BoundingBox(*args)


def test_invalid_box_is_value_error():
    with pytest.raises(ValueError):
        BoundingBox(0, 0, 0, 0)
    assert issubclass(InvalidBox, BeltrackError)


def test_box_accepts_numpy_scalars():
    box = BoundingBox(np.float64(1.5), np.int64(2), np.float32(3), 4)
    assert box.area == 12.0


def test_box_helpers():
    box = BoundingBox(10, 10, 4, 8)
    assert box.center == (12.0, 14.0)
    assert box.to_xyxy() == (10, 10, 14, 18)
    assert box.translated(5) == BoundingBox(15, 10, 4, 8)


@pytest.mark.parametrize('index,expected', [
    (0, BinaryQuality.NORMAL),
    (1, BinaryQuality.DEFECT),
    (2, BinaryQuality.DEFECT),
    (3, BinaryQuality.DEFECT),
])
def test_to_binary(index, expected):
    assert to_binary(CategoryLabel(index)) == expected
    assert to_binary(index) == expected


def test_category_label_bounds():
    with pytest.raises(InvalidLabel):
        CategoryLabel(4)
    with pytest.raises(InvalidLabel):
        CategoryLabel(-1)
    with pytest.raises(InvalidLabel):
        CategoryLabel(0, num_categories=1)
    assert CategoryLabel(5, num_categories=6).name == 'category_5'


def test_category_names():
    assert [CategoryLabel(i).name for i in range(4)] == \
        ['fresh', 'bruise_defect', 'rot_defect', 'scab_defect']
    assert str(BinaryQuality.DEFECT) == 'defect'


def test_detection_score_range():
    box = BoundingBox(0, 0, 1, 1)
    Detection(0, box, 0.0)
    Detection(0, box, 1.0)
    with pytest.raises(InvalidDetection):
        Detection(0, box, 1.01)
    with pytest.raises(InvalidDetection):
        Detection(-1, box, 0.5)


def test_frame_detections_share_frame_index():
    box = BoundingBox(0, 0, 1, 1)
    frame = FrameDetections(3, [Detection(3, box, 0.9)])
    assert len(frame) == 1
    assert isinstance(frame.detections, tuple)
    with pytest.raises(InvalidDetection):
        FrameDetections(3, [Detection(4, box, 0.9)])


def test_track_box_at():
    a, b = BoundingBox(0, 0, 1, 1), BoundingBox(1, 0, 1, 1)
    track = Track(1, None, TrackStatus.ACTIVE, history=[(2, a), (5, b)])
    assert track.length == 2
    assert track.start_frame == 2
    assert track.box_at(5) == b
    assert track.box_at(3) is None
