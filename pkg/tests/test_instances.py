"""Tests for the instance generators and the instance factory."""

import math

import numpy as np
import pytest

from dalpha_seeding.constants import InstanceFamily, InstancePreset
from dalpha_seeding.core.diagnostics import (
    _pairwise_sq,
    cluster_moment,
    g_alpha,
    sigma_stats,
)
from dalpha_seeding.core.models import InstanceSpec, MixtureComponent
from dalpha_seeding.data.storage import save_csv
from dalpha_seeding.exceptions import UsageError
from dalpha_seeding.instances import (
    create_instance,
    gen_galpha_lb,
    gen_gaussian_mixture,
    gen_greedy_lb,
    gen_regular_simplex,
    gen_simplex_lb,
    gen_student_t_mixture,
    get_available_families,
    preset_spec,
)
from dalpha_seeding.instances.greedy import truncated_exponential, truncated_exponential_mean
from dalpha_seeding.instances.simplices import (
    galpha_lb_parameters,
    simplex_lb_parameters,
    simplex_side,
)
from dalpha_seeding.utils.rng import stream


def _components():
    return [
        MixtureComponent(mean=[0.0, 0.0]),
        MixtureComponent(mean=[50.0, 0.0], variance=4.0),
        MixtureComponent(mean=[0.0, 50.0], covariance=[[2.0, 0.5], [0.5, 1.0]], weight=2.0),
    ]


def test_gaussian_mixture_is_reproducible():
    ds = gen_gaussian_mixture(_components(), 300, seed=1)
    again = gen_gaussian_mixture(_components(), 300, seed=1)
    other = gen_gaussian_mixture(_components(), 300, seed=2)
    assert ds.points.shape == (300, 2)
    assert ds.k == 3
    np.testing.assert_array_equal(ds.points, again.points)
    assert not np.array_equal(ds.points, other.points)


def test_gaussian_mixture_moments():
    ds = gen_gaussian_mixture([MixtureComponent(mean=[3.0, -1.0], variance=4.0)], 20000, seed=0)
    np.testing.assert_allclose(ds.points.mean(axis=0), [3.0, -1.0], atol=0.1)
    np.testing.assert_allclose(ds.points.var(axis=0), [4.0, 4.0], rtol=0.05)


def test_mixture_rejects_bad_components():
    with pytest.raises(UsageError):
        gen_gaussian_mixture([MixtureComponent(mean=[0.0]), MixtureComponent(mean=[0.0, 1.0])], 10)
    with pytest.raises(UsageError):
        gen_gaussian_mixture([MixtureComponent(mean=[0.0, 0.0], covariance=[[1.0, 2.0], [2.0, 1.0]])], 10)
    with pytest.raises(ValueError):
        MixtureComponent(mean=[0.0, 0.0], variance=1.0, covariance=[[1.0, 0.0], [0.0, 1.0]])


def test_student_t_needs_nu_above_one():
    with pytest.raises(UsageError):
        gen_student_t_mixture([MixtureComponent(mean=[0.0], nu=1.0)], 10)
    ds = gen_student_t_mixture([MixtureComponent(mean=[0.0], nu=3.0)], 500, seed=4)
    assert ds.n == 500


def test_student_t_with_huge_nu_looks_gaussian():
    n, sigma = 20000, 2.0
    component = MixtureComponent(mean=[3.0, -1.0], variance=sigma**2, nu=1e6)
    ds = gen_student_t_mixture([component], n, seed=9)
    bound = 5 * sigma / math.sqrt(n)
    assert np.all(np.abs(ds.points.mean(axis=0) - [3.0, -1.0]) <= bound)
    np.testing.assert_allclose(ds.points.var(axis=0), [4.0, 4.0], rtol=0.05)


def test_presets():
    d1 = create_instance(preset_spec(InstancePreset.D1, n=400))
    d3 = create_instance(preset_spec(InstancePreset.D3, n=800))
    d4 = preset_spec(InstancePreset.D4)
    d5 = preset_spec(InstancePreset.D5)
    assert (d1.d, d1.k) == (2, 4)
    assert (d3.d, d3.k) == (3, 8)
    assert d4.components[0].variance == 800.0
    assert all(c.variance == 1.0 for c in d4.components[1:])
    assert d5.family == InstanceFamily.STUDENT_T_MIXTURE
    assert [c.nu for c in d5.components] == [1.6, 2.0, 5.0, 10.0]
    assert {abs(x) for c in d5.components for x in c.mean} == {50.0}


def test_regular_simplex():
    vertices = gen_regular_simplex(5, 2.0, np.arange(6, dtype=float), dim_offset=1)
    center = np.arange(6, dtype=float)
    np.testing.assert_allclose(((vertices - center) ** 2).sum(axis=1), 4.0)
    sq = _pairwise_sq(vertices, vertices)
    off_diagonal = sq[~np.eye(5, dtype=bool)]
    np.testing.assert_allclose(off_diagonal, off_diagonal[0])
    assert math.sqrt(off_diagonal[0]) == pytest.approx(simplex_side(5, 2.0), rel=1e-12)
    assert simplex_side(4, 1.0) == pytest.approx(math.sqrt(8.0 / 3.0))
    np.testing.assert_allclose(vertices[:, [0, 5]], np.tile(center[[0, 5]], (5, 1)))
    with pytest.raises(UsageError):
        gen_regular_simplex(5, 1.0, np.zeros(3))


def test_simplex_lb_instance():
    k, n, alpha = 6, 4, 4.0
    ds = gen_simplex_lb(k, n, alpha, seed=2)
    R, delta, _ = simplex_lb_parameters(k, alpha)
    assert ds.n == k * n
    assert ds.d == (n - 1) + (k - 2) + 1
    assert ds.cluster_sizes().tolist() == [n] * k
    assert R**alpha == pytest.approx(10 * k * delta**alpha)

    stats = sigma_stats(ds)
    assert stats.sigma_ratio == pytest.approx(math.sqrt(k), rel=1e-9)
    unit = ds.points[ds.labels == 1]
    sq = _pairwise_sq(unit, unit)[~np.eye(n, dtype=bool)]
    np.testing.assert_allclose(sq, 1.0, rtol=1e-9)


def test_simplex_lb_seed_only_shuffles():
    a = gen_simplex_lb(4, 3, 4.0, seed=0)
    b = gen_simplex_lb(4, 3, 4.0, seed=1)
    key = lambda ds: sorted(map(tuple, np.round(ds.points, 9)))
    assert key(a) == key(b)
    with pytest.raises(UsageError):
        gen_simplex_lb(4, 3, 2.0)


def test_galpha_lb_instance():
    n, alpha = 50, 4.0
    ds = gen_galpha_lb(n, alpha)
    big, delta = galpha_lb_parameters(n, alpha)
    stats = sigma_stats(ds)
    assert stats.opt_cost == pytest.approx(2.0 * n, rel=1e-9)
    assert stats.sigma[0] == pytest.approx(stats.sigma[1], rel=1e-9)
    assert ds.labels[-1] == 1
    assert ds.points[-1, 0] == pytest.approx(big)
    assert delta == pytest.approx(big / n**0.25)
    with pytest.raises(UsageError):
        gen_galpha_lb(3, 4.0)


def test_greedy_lb_instance():
    k, m, per = 8, 5, 200
    ds = gen_greedy_lb(k, m, per, seed=3)
    assert ds.n == k * per
    assert ds.d == 2 + (k // 4 - 1)
    a = math.log(m)
    b = a / math.sqrt(2.0)
    # every segment stays inside its square, within the half diagonal of its vertex
    for cluster in range(4):
        pts = ds.points[ds.labels == cluster][:, :2]
        assert np.all(np.abs(pts) <= a / 2.0 + 1e-12)
    vertex = np.array([a / 2.0, a / 2.0])
    offsets = np.linalg.norm(ds.points[ds.labels == 0][:, :2] - vertex, axis=1)
    assert offsets.max() <= b + 1e-12
    far = ds.points[ds.labels == 4][:, 2:]
    assert np.linalg.norm(far[0]) == pytest.approx(100.0 * m**3 * k, rel=1e-9)
    with pytest.raises(UsageError):
        gen_greedy_lb(6, m, per)
    with pytest.raises(UsageError):
        gen_greedy_lb(8, 2, per)


def test_greedy_lb_clusters_are_concentrated():
    bound = 4 * math.gamma(5.0)
    ds = gen_greedy_lb(8, 5, 300, seed=2)
    per_cluster = g_alpha(ds, 4.0, exact=True).per_cluster
    assert all(g is not None and g <= bound for g in per_cluster)
    # long segments, where the exponential profile is barely truncated
    for b in (10.0, 14.0):
        x = truncated_exponential(stream(1, int(b)), b, 3000)
        assert cluster_moment(x.reshape(-1, 1), 4.0) <= bound


def test_truncated_exponential():
    b = 1.3
    x = truncated_exponential(stream(0), b, 200000)
    assert x.min() >= 0.0 and x.max() <= b
    assert x.mean() == pytest.approx(truncated_exponential_mean(b), abs=0.005)


def test_factory(tmp_path, line_ds):
    path = tmp_path / "line.csv"
    save_csv(line_ds, path)
    loaded = create_instance(InstanceSpec(family=InstanceFamily.CUSTOM_CSV, path=path))
    np.testing.assert_array_equal(loaded.points, line_ds.points)
    assert not InstanceSpec(family=InstanceFamily.CUSTOM_CSV, path=path).is_stochastic

    ds = create_instance(InstanceSpec(family=InstanceFamily.GALPHA_LB, n=8, alpha=4.0))
    assert ds.k == 2
    assert set(get_available_families()) == {f.value for f in InstanceFamily}


def test_instance_spec_requires_family_parameters():
    with pytest.raises(ValueError):
        InstanceSpec(family=InstanceFamily.SIMPLEX_LB, k=4)
    with pytest.raises(ValueError):
        InstanceSpec(family=InstanceFamily.GREEDY_LB, k=8, m_samples=4, n_per_cluster=2, unknown=1)
