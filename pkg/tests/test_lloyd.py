"""Tests for Lloyd refinement."""

import numpy as np
import pytest

from dalpha_seeding.core.geometry import recompute_center_set
from dalpha_seeding.core.lloyd import lloyd_from_centers, lloyd_run
from dalpha_seeding.core.models import CenterSet, Dataset, SeedingConfig
from dalpha_seeding.core.seeding import seed
from dalpha_seeding.exceptions import UsageError


def test_two_clusters_on_a_line(line_ds):
    result = lloyd_run(line_ds, recompute_center_set(line_ds, [0, 3]))
    assert sorted(result.final_centers.ravel().tolist()) == [1.0, 11.0]
    assert result.final_cost2 == 4.0
    assert result.iterations == 2
    assert result.converged
    assert result.cost_history == [8.0, 4.0, 4.0]
    assert result.assignment.tolist() == [0, 0, 1, 1]


def test_fixed_point_stops_after_one_iteration(line_ds):
    result = lloyd_from_centers(line_ds, np.array([[1.0], [11.0]]))
    assert result.iterations == 1
    assert result.converged
    assert result.final_cost2 == 4.0


def test_empty_cluster_moves_to_farthest_point(line_ds):
    result = lloyd_from_centers(line_ds, np.array([[0.0], [100.0]]))
    assert result.converged
    assert result.final_cost2 == 4.0
    assert sorted(result.final_centers.ravel().tolist()) == [1.0, 11.0]


def test_cost_never_increases(square_ds):
    cs, _ = seed(square_ds, SeedingConfig(alpha=2.0, k=4, rng_seed=3))
    result = lloyd_run(square_ds, cs)
    history = np.array(result.cost_history)
    assert np.all(np.diff(history) <= 1e-9 * history[:-1])
    assert result.final_cost2 <= history[0]


def test_iteration_cap(square_ds):
    cs, _ = seed(square_ds, SeedingConfig(alpha=2.0, k=4, rng_seed=3))
    result = lloyd_run(square_ds, cs, max_iters=1, tol=0.0)
    assert result.iterations == 1
    assert len(result.cost_history) == 2


def test_bad_starting_centers(line_ds):
    with pytest.raises(UsageError):
        lloyd_from_centers(line_ds, np.zeros((2, 3)))
    with pytest.raises(UsageError):
        lloyd_run(line_ds, CenterSet.empty(line_ds))


def test_stop_rule_is_strict(line_ds):
    # a zero decrease is not below a zero tolerance
    result = lloyd_from_centers(line_ds, np.array([[1.0], [11.0]]), max_iters=5, tol=0.0)
    assert result.iterations == 5
    assert not result.converged
    assert result.cost_history == [4.0] * 6


def test_zero_cost_stops_immediately():
    ds = Dataset(points=[0.0, 0.0, 5.0, 5.0])
    result = lloyd_from_centers(ds, np.array([[0.0], [5.0]]), tol=0.0)
    assert result.iterations == 1
    assert result.converged
    assert result.final_cost2 == 0.0
