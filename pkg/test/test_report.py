import dataclasses

import pytest

from beltrack.aggregation import PredictionBuffer, majority_vote
from beltrack.core import CategoryLabel
from beltrack.metrics import defect_ratio
from beltrack.report import make_verdict_table, summarize_table, write_report


def verdict_of(track_id, indices, stability=None):
    buf = PredictionBuffer(track_id, [(f, CategoryLabel(c)) for f, c in enumerate(indices)])
    return dataclasses.replace(majority_vote(buf), stability_frame_wise=stability)


@pytest.fixture
def verdicts():
    return [verdict_of(3, [2, 2], 1.0), verdict_of(1, [0, 0, 1], 0.5),
            verdict_of(2, [3]), verdict_of(4, [0], 1.0)]


def test_summary_ratio_is_the_metric(verdicts):
    summary = summarize_table(make_verdict_table(verdicts), verdicts)
    assert summary['defect_ratio'] == defect_ratio(verdicts) == 0.5
    assert summary['defect_ratio_text'] == '0.5000'
    assert summary['n_tracks'] == 4
    assert summary['n_defect_tracks'] == 2
    assert summary['mean_stability_frame_wise'] == pytest.approx(2.5 / 3)


def test_empty_summary_has_no_ratio(tmp_path):
    html_path = str(tmp_path / 'empty.html')
    summary = write_report([], str(tmp_path / 'empty.csv'), html_path)
    assert summary['defect_ratio'] is None
    assert summary['mean_stability_frame_wise'] is None
    assert 'defect ratio: n/a' in open(html_path).read()


def test_report_files(tmp_path, verdicts):
    csv_path = tmp_path / 'v.csv'
    html_path = tmp_path / 'v.html'
    write_report(verdicts, str(csv_path), str(html_path), title='belt <1>')
    lines = csv_path.read_text().splitlines()
    assert lines[0] == 'track_id,category,category_name,binary,k,votes,stability_frame_wise'
    assert [line.split(',')[0] for line in lines[1:]] == ['1', '2', '3', '4']
    assert lines[2].endswith(',n/a')
    page = html_path.read_text()
    assert 'belt &lt;1&gt;' in page
    assert page.count('<tr class="defect">') == 2
