"""Tests for the SVG charts."""

import math
import xml.etree.ElementTree as ET

import pytest

from dalpha_seeding.constants import SeedingMethod
from dalpha_seeding.core.models import SummaryRow
from dalpha_seeding.exceptions import UsageError
from dalpha_seeding.services.plotting import emit_svg, series_id


def _row(alpha, method, mean, lloyd=None):
    return SummaryRow(
        alpha=alpha,
        method=method,
        trials=4,
        mean_seed_ratio=mean,
        std_seed_ratio=0.2,
        sem_seed_ratio=0.1,
        mean_lloyd_ratio=lloyd,
        std_lloyd_ratio=None if lloyd is None else 0.1,
        sem_lloyd_ratio=None if lloyd is None else 0.05,
    )


def _summary():
    return [
        _row(alpha, method, mean)
        for method in (SeedingMethod.DALPHA, SeedingMethod.GREEDY)
        for alpha, mean in ((2.0, 3.0), (6.0, 1.5), (math.inf, 2.5))
    ]


def test_svg_is_well_formed_with_one_line_per_method(tmp_path):
    path = tmp_path / "plots" / "sweep.svg"
    emit_svg(_summary(), path, title="D1")
    root = ET.parse(path).getroot()
    ids = [el.get("id") for el in root.iter() if el.get("id")]
    assert ids.count(series_id("dalpha")) == 1
    assert ids.count(series_id("greedy")) == 1
    text = path.read_text()
    assert "alpha" in text
    assert "∞" in text


def test_lloyd_metric_needs_values(tmp_path):
    with pytest.raises(UsageError):
        emit_svg(_summary(), tmp_path / "lloyd.svg", metric="lloyd")
    rows = [_row(2.0, SeedingMethod.DALPHA, 3.0, lloyd=1.1), _row(4.0, SeedingMethod.DALPHA, 2.0, lloyd=1.0)]
    emit_svg(rows, tmp_path / "lloyd.svg", metric="lloyd")
    assert (tmp_path / "lloyd.svg").exists()


def test_empty_summary_is_refused(tmp_path):
    with pytest.raises(UsageError):
        emit_svg([], tmp_path / "empty.svg")
    with pytest.raises(UsageError):
        emit_svg(_summary(), tmp_path / "bad.svg", metric="variance")
