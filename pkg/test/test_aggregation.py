import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beltrack.aggregation import (COLLAPSE_THEN_VOTE, LOWEST_INDEX,
                                  AggregationConfig, EmptyBuffer,
                                  PredictionBuffer, frame_wise_verdicts,
                                  majority_vote, record_prediction,
                                  running_verdicts)
from beltrack.core import BinaryQuality, CategoryLabel, InvalidLabel, OutOfOrderFrame


def buffer_of(indices, track_id=1, num_categories=4):
    return PredictionBuffer(track_id, [(f, CategoryLabel(c, num_categories))
                                       for f, c in enumerate(indices)], num_categories)


def test_majority_of_defect_labels():
    v = majority_vote(buffer_of([0, 2, 2, 2, 0]))
    assert v.final_category.index == 2
    assert v.final_binary == BinaryQuality.DEFECT
    assert v.vote_counts == (2, 0, 3, 0)
    assert v.k == 5


def test_tie_prefers_defect():
    v = majority_vote(buffer_of([0, 1, 0, 1]))
    assert v.final_category.index == 1
    assert v.final_binary == BinaryQuality.DEFECT


def test_tie_between_defects_takes_lowest_index():
    assert majority_vote(buffer_of([3, 1, 3, 1])).final_category.index == 1


def test_tie_lowest_index_rule():
    cfg = AggregationConfig(tie_break=LOWEST_INDEX)
    v = majority_vote(buffer_of([0, 1, 0, 1]), cfg)
    assert v.final_category.index == 0
    assert v.final_binary == BinaryQuality.NORMAL


def test_single_prediction():
    v = majority_vote(buffer_of([3]))
    assert v.final_category.index == 3
    assert v.k == 1


def test_collapse_then_vote_can_pick_a_minority_category():
    # 3 fresh against 4 split defects: per category fresh wins, by side defect wins
    labels = [0, 0, 0, 1, 1, 2, 3]
    assert majority_vote(buffer_of(labels)).final_category.index == 0
    v = majority_vote(buffer_of(labels), AggregationConfig(order=COLLAPSE_THEN_VOTE))
    assert v.final_binary == BinaryQuality.DEFECT
    assert v.final_category.index == 1


def test_collapse_then_vote_normal_side():
    v = majority_vote(buffer_of([0, 0, 0, 2]), AggregationConfig(order=COLLAPSE_THEN_VOTE))
    assert v.final_category.index == 0


def test_empty_buffer():
    with pytest.raises(EmptyBuffer):
        majority_vote(PredictionBuffer(7))
    with pytest.raises(EmptyBuffer):
        frame_wise_verdicts(PredictionBuffer(7))
    with pytest.raises(EmptyBuffer):
        running_verdicts(PredictionBuffer(7))


def test_record_prediction_order():
    buf = PredictionBuffer(1)
    record_prediction(buf, 4, CategoryLabel(0))
    with pytest.raises(OutOfOrderFrame):
        record_prediction(buf, 4, CategoryLabel(1))
    with pytest.raises(OutOfOrderFrame):
        record_prediction(buf, 2, CategoryLabel(1))
    record_prediction(buf, 9, CategoryLabel(1))
    assert buf.last_frame == 9
    assert len(buf) == 2


def test_record_prediction_rejects_foreign_category():
    buf = PredictionBuffer(1, num_categories=3)
    with pytest.raises(InvalidLabel):
        record_prediction(buf, 0, CategoryLabel(3, 4))


def test_frame_wise_verdicts():
    assert frame_wise_verdicts(buffer_of([0, 2, 0])) == [
        BinaryQuality.NORMAL, BinaryQuality.DEFECT, BinaryQuality.NORMAL]


def test_running_verdicts_end_at_majority():
    buf = buffer_of([0, 1, 1, 0, 0])
    running = running_verdicts(buf)
    assert [v.final_category.index for v in running] == [0, 1, 1, 1, 0]
    assert running[-1] == majority_vote(buf)


@pytest.mark.parametrize('kwargs', [
    {'num_categories': 1},
    {'tie_break': 'coin'},
    {'order': 'sideways'},
])
def test_invalid_config(kwargs):
    with pytest.raises(ValueError):
        AggregationConfig(**kwargs)


labels = st.lists(st.integers(0, 3), min_size=1, max_size=40)


@settings(max_examples=200)
@given(labels, st.randoms(use_true_random=False))
def test_vote_ignores_order(indices, random):
    shuffled = list(indices)
    random.shuffle(shuffled)
    a = majority_vote(buffer_of(indices))
    b = majority_vote(buffer_of(shuffled))
    assert a.final_category == b.final_category
    assert a.vote_counts == b.vote_counts


@settings(max_examples=200)
@given(labels)
def test_adding_the_winner_keeps_it(indices):
    winner = majority_vote(buffer_of(indices)).final_category.index
    assert majority_vote(buffer_of(indices + [winner])).final_category.index == winner


@settings(max_examples=200)
@given(labels)
def test_winner_holds_maximal_count(indices):
    v = majority_vote(buffer_of(indices))
    counts = np.bincount(indices, minlength=4)
    assert counts[v.final_category.index] == counts.max()
    assert sum(v.vote_counts) == v.k == len(indices)
