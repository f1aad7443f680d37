"""
Regular simplices and the lower-bound instances built from them.
"""

import math
from typing import Sequence, Tuple

import numpy as np

from dalpha_seeding.constants import FAR_DISTANCE_MULTIPLIER, SIMPLEX_LB_SEPARATION_FACTOR
from dalpha_seeding.core.models import Dataset
from dalpha_seeding.exceptions import UsageError
from dalpha_seeding.utils.logging import get_logger
from dalpha_seeding.utils.rng import stream

logger = get_logger(__name__)


def _helmert_basis(n: int) -> np.ndarray:
    """``(n - 1, n)`` orthonormal basis of the vectors whose entries sum to zero."""
    basis = np.zeros((n - 1, n))
    for j in range(1, n):
        basis[j - 1, :j] = 1.0
        basis[j - 1, j] = -float(j)
        basis[j - 1] /= math.sqrt(j * (j + 1))
    return basis


def simplex_side(n_points: int, circumradius: float) -> float:
    """Edge length of a regular simplex with the given circumradius."""
    return circumradius * math.sqrt(2.0 * n_points / (n_points - 1))


def simplex_circumradius(n_points: int, side: float) -> float:
    """Circumradius of a regular simplex with the given edge length."""
    return side / math.sqrt(2.0 * n_points / (n_points - 1))


def gen_regular_simplex(
    n_points: int, circumradius: float, center: Sequence[float], dim_offset: int = 0
) -> np.ndarray:
    """
    Vertices of a regular simplex.

    The ``n_points`` vertices lie at distance ``circumradius`` from ``center``
    and span coordinates ``dim_offset .. dim_offset + n_points - 2``; all other
    coordinates equal those of ``center``.

    Raises:
        UsageError: If ``n_points < 2`` or ``center`` has too few dimensions
    """
    center = np.asarray(center, dtype=np.float64)
    if n_points < 2:
        raise UsageError("a simplex needs at least two points", {"n_points": n_points})
    needed = dim_offset + n_points - 1
    if center.ndim != 1 or center.shape[0] < needed or dim_offset < 0:
        raise UsageError(
            "ambient dimension too small for the simplex",
            {"needed": needed, "dim": int(center.shape[0]) if center.ndim == 1 else None},
        )
    centered = np.eye(n_points) - 1.0 / n_points
    local = centered @ _helmert_basis(n_points).T
    local *= circumradius / math.sqrt((n_points - 1) / n_points)

    vertices = np.tile(center, (n_points, 1))
    vertices[:, dim_offset:needed] += local
    return vertices


def simplex_lb_parameters(k: int, alpha: float) -> Tuple[float, float, float]:
    """
    ``(R, delta, far)`` for the sigma-ratio instance: big-cluster side
    ``R = sqrt(k)``, unit-cluster separation ``delta`` with
    ``R^alpha = 10 k delta^alpha`` and the far offset ``10^6 R k``.
    """
    R = math.sqrt(k)
    delta = R * (SIMPLEX_LB_SEPARATION_FACTOR * k) ** (-1.0 / alpha)
    return R, delta, FAR_DISTANCE_MULTIPLIER * R * k


def gen_simplex_lb(k: int, n_per_cluster: int, alpha: float, seed: int = 0) -> Dataset:
    """
    Instance with one wide cluster far from ``k - 1`` tight ones.

    Cluster 0 is a regular simplex of side ``R``; clusters ``1 .. k-1`` are
    unit-side simplices of the same shape dimensions whose centroids form a
    regular simplex of side ``delta`` in ``k - 2`` further dimensions. The
    wide cluster sits ``far`` away along one last dimension. The seed only
    shuffles row order.

    Raises:
        UsageError: If ``k < 2``, ``n_per_cluster < 2`` or ``alpha <= 2``
    """
    if k < 2 or n_per_cluster < 2:
        raise UsageError("need k >= 2 and n_per_cluster >= 2", {"k": k, "n": n_per_cluster})
    if not alpha > 2.0:
        raise UsageError("alpha must be > 2", {"alpha": alpha})
    R, delta, far = simplex_lb_parameters(k, alpha)
    n = n_per_cluster
    shape_dims = n - 1
    spread_dims = max(k - 2, 0)
    dim = shape_dims + spread_dims + 1
    origin = np.zeros(dim)

    unit_shape = gen_regular_simplex(n, simplex_circumradius(n, 1.0), origin, 0)
    if k - 1 >= 2:
        centroids = gen_regular_simplex(k - 1, simplex_circumradius(k - 1, delta), origin, shape_dims)
    else:
        centroids = origin[None, :]

    blocks = []
    far_center = origin.copy()
    far_center[-1] = far
    blocks.append(gen_regular_simplex(n, simplex_circumradius(n, R), far_center, 0))
    for centroid in centroids:
        blocks.append(unit_shape + centroid)

    points = np.vstack(blocks)
    labels = np.repeat(np.arange(k, dtype=np.int64), n)
    order = stream(seed, 0).permutation(points.shape[0])
    logger.debug(f"sigma-ratio instance: k={k}, n={n}, R={R:.6g}, delta={delta:.6g}")
    return Dataset(points=points[order], labels=labels[order])


def galpha_lb_parameters(n: int, alpha: float) -> Tuple[float, float]:
    """
    ``(Delta, delta)`` for the concentration instance: ``Delta = n / sqrt(n - 1)``
    makes the two-valued cluster's ``cost^(2)`` around its centroid equal ``n``,
    and ``delta = Delta / n^(1/alpha)``.
    """
    big = n / math.sqrt(n - 1)
    return big, big / n ** (1.0 / alpha)


def gen_galpha_lb(n: int, alpha: float) -> Dataset:
    """
    Two clusters of ``n`` points with equal deviation but very different g_alpha.

    Cluster 0 is a regular simplex of circumradius 1 centered at
    ``(-delta, 0, ...)``; cluster 1 has ``n - 1`` points at the origin and one
    isolated point at ``(Delta, 0, ...)``, stored as the last row.

    Raises:
        UsageError: If ``n < 4`` or ``alpha <= 2``
    """
    if n < 4:
        raise UsageError("need n >= 4", {"n": n})
    if not alpha > 2.0:
        raise UsageError("alpha must be > 2", {"alpha": alpha})
    big, delta = galpha_lb_parameters(n, alpha)
    center = np.zeros(n)
    center[0] = -delta
    simplex = gen_regular_simplex(n, 1.0, center, 1)
    spike = np.zeros((n, n))
    spike[-1, 0] = big
    points = np.vstack([simplex, spike])
    labels = np.repeat(np.array([0, 1], dtype=np.int64), n)
    return Dataset(points=points, labels=labels)
