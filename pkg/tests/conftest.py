"""Shared fixtures for the dalpha-seeding test suite."""

import numpy as np
import pytest

from dalpha_seeding.constants import InstancePreset
from dalpha_seeding.core.models import Dataset
from dalpha_seeding.instances import create_instance, preset_spec


@pytest.fixture
def line_ds() -> Dataset:
    """Four points on a line, two reference clusters."""
    return Dataset(points=[0.0, 2.0, 10.0, 12.0], labels=[0, 0, 1, 1])


@pytest.fixture
def square_ds() -> Dataset:
    """Small D1 mixture: four unit Gaussians on a square of side 100."""
    return create_instance(preset_spec(InstancePreset.D1, n=200, seed=3))


@pytest.fixture
def uneven_ds() -> Dataset:
    """Clusters of different sizes and spreads, so every size class is populated."""
    rng = np.random.default_rng(7)
    sizes = [3, 5, 9, 17, 2]
    blocks, labels = [], []
    for c, size in enumerate(sizes):
        blocks.append(rng.normal(loc=40.0 * c, scale=1.0 + c, size=(size, 2)))
        labels.extend([c] * size)
    return Dataset(points=np.vstack(blocks), labels=labels)


def random_labeled(rng: np.random.Generator, k: int, n: int, d: int) -> Dataset:
    """Random labeled dataset where every cluster has at least two points."""
    labels = np.concatenate([np.repeat(np.arange(k), 2), rng.integers(0, k, n - 2 * k)])
    centers = rng.normal(scale=20.0, size=(k, d))
    points = centers[labels] + rng.normal(scale=rng.uniform(0.5, 3.0), size=(n, d))
    return Dataset(points=points, labels=labels)
