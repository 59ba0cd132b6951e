import math

import pytest

from core.report import (REPORT_COLUMNS, RatioRow, build_report, combine_ratio, is_stable, relative_spread,
                         summarize_depths, validate_rows)


def test_combine_ratio():
    row = combine_ratio('invariance', 'bump-001', 5, 2.0, 3.0)
    assert row.ratio == 1.5
    assert row.verdict == 'finite'


def test_combine_ratio_zero_input():
    row = combine_ratio('invariance', 'constant-000', 5, 0.0, 1.0)
    assert math.isnan(row.ratio)
    assert row.verdict == 'zero-input'


def test_combine_ratio_infinite_output():
    assert combine_ratio('lift', 'x', 1, 1.0, math.inf).verdict == 'infinite'


def test_summarize_depths_skips_nan():
    rows = [
        combine_ratio('e', 'a', 4, 1.0, 2.0),
        combine_ratio('e', 'b', 4, 1.0, 3.0),
        combine_ratio('e', 'c', 3, 1.0, 1.0),
        combine_ratio('e', 'd', 5, 0.0, 1.0),
    ]
    assert summarize_depths(rows) == {3: 1.0, 4: 3.0}


def test_relative_spread():
    assert relative_spread([2.0, 2.5, 3.0]) == pytest.approx(0.5)
    assert relative_spread([1.0]) == 0.0
    assert relative_spread([1.0, math.nan, 1.2]) == pytest.approx(0.2)
    assert is_stable([1.0, 1.25])
    assert not is_stable([1.0, 1.5])


def test_validate_rows():
    good = [combine_ratio('e', 'a', 4, 1.0, 2.0), combine_ratio('e', 'b', 4, 0.0, 0.0)]
    assert validate_rows(good, 'e')
    assert not validate_rows([], 'e')
    assert not validate_rows([RatioRow('e', 'a', 4, 1.0, 2.0, 5.0, 'finite')], 'e')
    assert not validate_rows([RatioRow('e', 'a', 4, -1.0, 2.0, -2.0, 'finite')], 'e')


def test_report_frame_and_max_ratio():
    rows = [combine_ratio('e', 'a', 4, 1.0, 2.0), combine_ratio('e', 'b', 4, 0.0, 1.0)]
    report = build_report('e', rows, {'finite': True})
    frame = report.to_frame()
    assert list(frame.columns) == REPORT_COLUMNS
    assert len(frame) == 2
    assert report.max_ratio == 2.0
    assert report.depth_summary == {4: 2.0}
