"""
Gaussian and student-t mixture samplers.

Component choice draws from ``stream(seed, 0)``; component ``j`` samples its
points from ``stream(seed, 1 + j)``, so adding points to one component never
changes the draws of another.
"""

from typing import List

import numpy as np

from dalpha_seeding.core.models import Dataset, MixtureComponent
from dalpha_seeding.exceptions import UsageError
from dalpha_seeding.utils.logging import get_logger
from dalpha_seeding.utils.rng import stream

logger = get_logger(__name__)


def _scale_factor(component: MixtureComponent) -> np.ndarray:
    """Lower-triangular factor ``L`` with ``L @ L.T`` equal to the component covariance."""
    d = component.dim
    if component.covariance is not None:
        covariance = np.asarray(component.covariance, dtype=np.float64)
        if not np.allclose(covariance, covariance.T):
            raise UsageError("covariance must be symmetric", {"mean": component.mean})
        try:
            return np.linalg.cholesky(covariance)
        except np.linalg.LinAlgError as e:
            raise UsageError(
                "covariance is not positive definite", {"mean": component.mean}
            ) from e
    variance = 1.0 if component.variance is None else component.variance
    return np.sqrt(variance) * np.eye(d)


def _component_labels(components: List[MixtureComponent], n: int, seed: int) -> np.ndarray:
    if not components:
        raise UsageError("a mixture needs at least one component")
    if n < 1:
        raise UsageError("n must be >= 1", {"n": n})
    dims = {c.dim for c in components}
    if len(dims) != 1:
        raise UsageError("all components must share one dimension", {"dims": sorted(dims)})
    weights = np.array([c.weight for c in components], dtype=np.float64)
    return stream(seed, 0).choice(len(components), size=n, p=weights / weights.sum())


def _compact(points: np.ndarray, labels: np.ndarray, n_components: int) -> Dataset:
    """Drop ids of components that drew no point so labels stay contiguous."""
    present, labels = np.unique(labels, return_inverse=True)
    if present.shape[0] < n_components:
        logger.warning(
            f"{n_components - present.shape[0]} mixture component(s) drew no points; "
            "labels were compacted"
        )
    return Dataset(points=points, labels=labels.astype(np.int64))


def gen_gaussian_mixture(components: List[MixtureComponent], n: int, seed: int = 0) -> Dataset:
    """
    Sample ``n`` points from a Gaussian mixture.

    Args:
        components: Mixture components (mean, covariance or variance, weight)
        n: Number of points
        seed: Base seed of the component streams

    Returns:
        Dataset labeled by generating component

    Raises:
        UsageError: On mismatched dimensions or a covariance that is not SPD
    """
    labels = _component_labels(components, n, seed)
    factors = [_scale_factor(c) for c in components]
    d = components[0].dim
    points = np.empty((n, d))
    for j, (component, factor) in enumerate(zip(components, factors)):
        rows = np.flatnonzero(labels == j)
        if rows.size == 0:
            continue
        z = stream(seed, 1 + j).standard_normal((rows.size, d))
        points[rows] = np.asarray(component.mean) + z @ factor.T

    logger.debug(f"sampled {n} points from a {len(components)}-component Gaussian mixture")
    return _compact(points, labels, len(components))


def gen_student_t_mixture(components: List[MixtureComponent], n: int, seed: int = 0) -> Dataset:
    """
    Sample ``n`` points from a mixture of multivariate student-t distributions.

    Each point is ``mu + L z / sqrt(w / nu)`` with ``z`` standard normal and
    ``w`` chi-square with ``nu`` degrees of freedom.

    Raises:
        UsageError: If a component has no ``nu`` or ``nu <= 1``
    """
    for component in components:
        if component.nu is None or not component.nu > 1.0:
            raise UsageError(
                "student-t components need nu > 1 (finite mean)", {"nu": component.nu}
            )
    labels = _component_labels(components, n, seed)
    factors = [_scale_factor(c) for c in components]
    d = components[0].dim
    points = np.empty((n, d))
    for j, (component, factor) in enumerate(zip(components, factors)):
        rows = np.flatnonzero(labels == j)
        if rows.size == 0:
            continue
        rng = stream(seed, 1 + j)
        z = rng.standard_normal((rows.size, d))
        w = rng.chisquare(component.nu, size=rows.size)
        points[rows] = np.asarray(component.mean) + (z @ factor.T) / np.sqrt(w / component.nu)[:, None]

    logger.debug(f"sampled {n} points from a {len(components)}-component student-t mixture")
    return _compact(points, labels, len(components))
