"""Tests for instance parameters and bound expressions."""

import math

import numpy as np
import pytest

from conftest import random_labeled
from dalpha_seeding.core.diagnostics import (
    bound_report,
    check_cost_alpha_clusters,
    cluster_moment,
    cost_ratio,
    explicit_bound,
    f_alpha,
    g_alpha,
    h_alpha,
    hit_cost_factor,
    param_report,
    potential_global_constant,
    sigma_stats,
    standardized_moment_bound,
    theorem_bound,
    weight_classes,
)
from dalpha_seeding.core.geometry import recompute_center_set, total_cost
from dalpha_seeding.core.lloyd import lloyd_run
from dalpha_seeding.core.models import Dataset
from dalpha_seeding.exceptions import UsageError


def test_g2_is_exactly_two_on_random_datasets():
    rng = np.random.default_rng(2024)
    for _ in range(15):
        k = int(rng.integers(2, 11))
        ds = random_labeled(rng, k, int(rng.integers(2 * k + 1, 300)), int(rng.integers(1, 6)))
        result = g_alpha(ds, 2.0)
        assert result.value == pytest.approx(2.0, rel=1e-9)
        assert all(v == pytest.approx(2.0, rel=1e-9) for v in result.per_cluster)


def test_cluster_moment_of_two_points():
    assert cluster_moment([[0.0], [2.0]], 2.0) == pytest.approx(2.0)
    # pairs at distance 2 (half of them) over sigma = 1
    assert cluster_moment([[0.0], [2.0]], 4.0) == pytest.approx(8.0)
    assert cluster_moment([[1.0]], 4.0) is None
    assert cluster_moment([[1.0], [1.0]], 4.0) is None


def test_g_alpha_excludes_degenerate_clusters():
    ds = Dataset(points=[0.0, 0.0, 1.0, 3.0, 7.0], labels=[0, 0, 1, 1, 2])
    result = g_alpha(ds, 4.0)
    assert result.excluded == [0, 2]
    assert result.per_cluster[0] is None
    assert result.value == pytest.approx(8.0)


@pytest.mark.parametrize("alpha", [2.0, 4.0, 7.5])
def test_g_alpha_is_scale_invariant(uneven_ds, alpha):
    base = g_alpha(uneven_ds, alpha, exact=True)
    for scale in (1e-3, 3.7, 250.0):
        scaled = Dataset(points=uneven_ds.points * scale, labels=uneven_ds.labels)
        result = g_alpha(scaled, alpha, exact=True)
        assert result.value == pytest.approx(base.value, rel=1e-9)
        assert result.per_cluster == pytest.approx(base.per_cluster, rel=1e-9)


def test_g_alpha_preconditions(square_ds):
    with pytest.raises(UsageError):
        g_alpha(square_ds, 1.5)
    with pytest.raises(UsageError):
        g_alpha(square_ds, math.inf)


def test_g_alpha_subsamples_large_clusters(square_ds, monkeypatch):
    from dalpha_seeding.config import get_config

    settings = get_config().diagnostics
    monkeypatch.setattr(settings, "galpha_exact_threshold", 10)
    monkeypatch.setattr(settings, "galpha_sample_size", 20)
    approx = g_alpha(square_ds, 4.0)
    exact = g_alpha(square_ds, 4.0, exact=True)
    assert approx.approximate
    assert not exact.approximate
    assert approx.value == pytest.approx(exact.value, rel=0.5)


def test_standardized_moment_bounds_g_alpha(uneven_ds):
    for alpha in (2.0, 4.0, 10.0):
        assert standardized_moment_bound(uneven_ds, alpha) >= g_alpha(uneven_ds, alpha).value


def test_sigma_stats(line_ds):
    stats = sigma_stats(line_ds)
    assert stats.sizes == [2, 2]
    assert stats.sigma == [1.0, 1.0]
    assert stats.sigma_ratio == 1.0
    assert stats.opt_cost == 4.0


def test_sigma_ratio_infinite_when_a_cluster_has_no_spread():
    ds = Dataset(points=[0.0, 0.0, 5.0, 9.0], labels=[0, 0, 1, 1])
    stats = sigma_stats(ds)
    assert stats.ratio_infinite
    assert stats.sigma_ratio == math.inf


def test_weight_classes(uneven_ds):
    classes = weight_classes(uneven_ds)
    # sizes 3, 5, 9, 17, 2
    assert classes.cluster_class == [1, 2, 3, 4, 1]
    assert classes.histogram == {1: 2, 2: 1, 3: 1, 4: 1}
    assert classes.members[1] == [0, 4]
    assert classes.ell == 4


def test_bound_constants():
    assert f_alpha(4.0) == pytest.approx(16.0)
    assert h_alpha(4.0) == pytest.approx(0.5)
    assert potential_global_constant(4.0) == pytest.approx(16.0 * (3.0 + math.sqrt(2.0)))
    assert hit_cost_factor(4.0, 1.0) == pytest.approx(4.0 * math.e + 25.0)


def test_theorem_bound_unit_parameters():
    assert theorem_bound(4.0, 1.0, 1.0, 1, 16) == pytest.approx(16.0)
    # min(ell, log2 k) caps the class count
    assert theorem_bound(4.0, 1.0, 1.0, 10, 4) == pytest.approx(16.0 * math.sqrt(2.0))


def test_explicit_bound():
    expected = 4.0 * math.e + 25.0 + 2.0 * 16.0 * (3.0 + math.sqrt(2.0))
    assert explicit_bound(4.0, 1.0, 1.0, 1, 16) == pytest.approx(expected)
    report = bound_report(4.0, 1.0, 1.0, 1, 16)
    assert report.bound_value == pytest.approx(16.0)
    assert report.explicit_bound == pytest.approx(expected)


@pytest.mark.parametrize(
    "args",
    [(2.0, 1.0, 1.0, 1, 4), (math.inf, 1.0, 1.0, 1, 4), (4.0, 1.0, 0.5, 1, 4), (4.0, 1.0, 1.0, 1, 0)],
)
def test_bound_preconditions(args):
    with pytest.raises(UsageError):
        theorem_bound(*args)


def test_cost_ratio(line_ds):
    cs = recompute_center_set(line_ds, [0, 3])
    assert cost_ratio(line_ds, cs) == pytest.approx(total_cost(cs) / 4.0)
    assert cost_ratio(line_ds, lloyd_run(line_ds, cs)) == pytest.approx(1.0)


def test_cost_ratio_undefined_for_zero_reference_cost():
    ds = Dataset(points=[0.0, 5.0], labels=[0, 1])
    assert math.isnan(cost_ratio(ds, recompute_center_set(ds, [0])))


def test_param_report(square_ds):
    report = param_report(square_ds, 4.0, exact=True)
    assert report.k == 4
    assert report.n == 200
    assert report.g_alpha is not None
    assert report.bound_value == pytest.approx(
        theorem_bound(4.0, report.g_alpha, report.sigma_ratio, report.ell, report.k)
    )
    assert report.explicit_bound is not None
    assert param_report(square_ds, 2.0).bound_value is None


def test_cost_alpha_clusters_lemma(uneven_ds):
    check = check_cost_alpha_clusters(uneven_ds, 6.0)
    assert check.checked == 5
    assert check.violations == 0
