"""Tests for the distance and cost kernels."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from dalpha_seeding.core.geometry import (
    add_center,
    cluster_costs,
    log_total_cost,
    recompute_center_set,
    squared_distance,
    total_cost,
)
from dalpha_seeding.core.models import CenterSet, Dataset
from dalpha_seeding.exceptions import NumericRangeError, UsageError


def test_squared_distance():
    assert squared_distance([0.0, 0.0], [3.0, 4.0]) == 25.0
    assert squared_distance(1.0, 4.0) == 9.0
    with pytest.raises(UsageError):
        squared_distance([0.0, 0.0], [1.0])


@pytest.mark.parametrize(
    "points, labels, match",
    [
        ([[0.0, math.nan]], None, "finite"),
        ([0.0, 1.0], [0, -1], "non-negative"),
        (np.zeros((2, 2, 2)), None, "array"),
    ],
)
def test_dataset_validation_raises_usage_error(points, labels, match):
    with pytest.raises(UsageError, match=match) as info:
        Dataset(points=points, labels=labels)
    assert not isinstance(info.value, ValidationError)


def test_dataset_type_errors_are_usage_errors():
    with pytest.raises(UsageError, match="invalid Dataset"):
        Dataset(points="not numbers")


def test_incremental_update_matches_recompute():
    rng = np.random.default_rng(0)
    # integer grid so ties between centers actually happen
    ds = Dataset(points=rng.integers(0, 4, size=(60, 2)).astype(float))
    order = rng.permutation(ds.n)[:12]

    cs = CenterSet.empty(ds)
    for step, z in enumerate(order, start=1):
        add_center(cs, int(z))
        oracle = recompute_center_set(ds, order[:step])
        np.testing.assert_array_equal(cs.nearest_sq, oracle.nearest_sq)
        np.testing.assert_array_equal(cs.nearest_center, oracle.nearest_center)
        assert cs.centers == oracle.centers


def test_add_center_marks_center_with_zero_distance(line_ds):
    cs = add_center(CenterSet.empty(line_ds), 2)
    assert cs.is_center[2]
    assert cs.nearest_sq[2] == 0.0
    assert cs.nearest_sq.tolist() == [100.0, 64.0, 0.0, 4.0]
    assert cs.nearest_center.tolist() == [0, 0, 0, 0]


def test_add_center_rejects_bad_indices(line_ds):
    cs = add_center(CenterSet.empty(line_ds), 0)
    with pytest.raises(UsageError):
        add_center(cs, 0)
    with pytest.raises(UsageError):
        add_center(cs, 4)
    with pytest.raises(UsageError):
        add_center(cs, -1)


def test_total_cost_matches_brute_force(square_ds):
    cs = recompute_center_set(square_ds, [0, 5, 17])
    centers = square_ds.points[[0, 5, 17]]
    dist = ((square_ds.points[:, None, :] - centers[None]) ** 2).sum(axis=2).min(axis=1)
    assert total_cost(cs) == pytest.approx(dist.sum(), rel=1e-12)
    assert total_cost(cs, 4.0) == pytest.approx((dist**2).sum(), rel=1e-12)
    assert log_total_cost(cs, 4.0) == pytest.approx(math.log((dist**2).sum()), rel=1e-12)


def test_total_cost_preconditions(line_ds):
    with pytest.raises(UsageError):
        total_cost(CenterSet.empty(line_ds))
    cs = recompute_center_set(line_ds, [0])
    with pytest.raises(UsageError):
        total_cost(cs, 1.0)


def test_total_cost_overflow_reports_log_value():
    ds = Dataset(points=[0.0, 1e100])
    cs = recompute_center_set(ds, [0])
    with pytest.raises(NumericRangeError) as info:
        total_cost(cs, 8.0)
    assert info.value.log_value == pytest.approx(4.0 * math.log(1e200), rel=1e-12)


def test_log_total_cost_all_centers(line_ds):
    cs = recompute_center_set(line_ds, [0, 1, 2, 3])
    assert log_total_cost(cs, 4.0) == -math.inf
    assert total_cost(cs) == 0.0


def test_cluster_costs(line_ds):
    cs = recompute_center_set(line_ds, [0])
    costs = cluster_costs(cs, line_ds, 4.0)
    assert costs.cost2.tolist() == [4.0, 244.0]
    assert costs.cost_alpha.tolist() == [16.0, 100.0**2 + 144.0**2]
    np.testing.assert_allclose(costs.alpha_norm, np.sqrt(costs.cost_alpha), rtol=1e-12)


def test_cluster_alpha_norm_stays_finite_for_large_alpha():
    ds = Dataset(points=[0.0, 1e3, 2e3, 5.0], labels=[0, 1, 1, 0])
    cs = recompute_center_set(ds, [0])
    costs = cluster_costs(cs, ds, 400.0)
    assert np.isfinite(costs.alpha_norm).all()
    # the farthest point dominates: norm tends to its squared distance
    assert costs.alpha_norm[1] == pytest.approx(4e6, rel=1e-2)
    assert costs.alpha_norm[0] == pytest.approx(25.0)


def test_cluster_alpha_cost_overflow_raises():
    ds = Dataset(points=[0.0, 1e3, 2e3, 5.0], labels=[0, 1, 1, 0])
    costs = cluster_costs(recompute_center_set(ds, [0]), ds, 400.0)
    with pytest.raises(NumericRangeError) as info:
        costs.cost_alpha
    assert info.value.details["clusters"] == [1]
    assert info.value.log_value == pytest.approx(200.0 * math.log(4e6), rel=1e-12)
    assert costs.log_cost_alpha[0] == pytest.approx(200.0 * math.log(25.0), rel=1e-12)
