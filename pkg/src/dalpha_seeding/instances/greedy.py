"""
Instance on which greedy k-means++ does worse than D^alpha seeding.

Clusters come in groups of four, one per vertex of a square of side
``a = ln m``. Every cluster is a segment running from its vertex toward the
square's center, with the distance from the vertex drawn from an exponential
law truncated to ``[0, b]`` (``b = a / sqrt 2``, the half diagonal). Group
centers are the vertices of a regular simplex of side ``100 m^3 k``.
"""

import math

import numpy as np

from dalpha_seeding.constants import GREEDY_LB_DELTA_MULTIPLIER
from dalpha_seeding.core.models import Dataset
from dalpha_seeding.exceptions import UsageError
from dalpha_seeding.instances.simplices import gen_regular_simplex, simplex_circumradius
from dalpha_seeding.utils.logging import get_logger
from dalpha_seeding.utils.rng import stream

logger = get_logger(__name__)

# Square vertices in the plane of each group, in cluster order
_VERTEX_SIGNS = np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])


def truncated_exponential(rng: np.random.Generator, b: float, size: int) -> np.ndarray:
    """Inverse-CDF draws from ``e^(-x) / (1 - e^(-b))`` on ``[0, b]``."""
    u = rng.random(size)
    return -np.log1p(u * np.expm1(-b))


def truncated_exponential_mean(b: float) -> float:
    """``1 - b / (e^b - 1)``."""
    return 1.0 - b / math.expm1(b)


def gen_greedy_lb(k: int, m_samples: int, n_per_cluster: int, seed: int = 0) -> Dataset:
    """
    Generate the greedy lower-bound instance.

    Cluster ``4 g + v`` is the segment of vertex ``v`` in group ``g``; its
    distances come from ``stream(seed, 1 + cluster)``. Group 0 is centered at
    the origin.

    Raises:
        UsageError: If ``k`` is not a multiple of 4, ``k < 8`` or ``m_samples < 3``
    """
    if k % 4 != 0 or k < 8:
        raise UsageError("k must be a multiple of 4 and at least 8", {"k": k})
    if m_samples < 3:
        raise UsageError("m_samples must be >= 3", {"m_samples": m_samples})
    if n_per_cluster < 1:
        raise UsageError("n_per_cluster must be >= 1", {"n_per_cluster": n_per_cluster})

    groups = k // 4
    a = math.log(m_samples)
    b = a / math.sqrt(2.0)
    side = GREEDY_LB_DELTA_MULTIPLIER * m_samples**3 * k
    dim = 2 + (groups - 1)
    group_centers = gen_regular_simplex(groups, simplex_circumradius(groups, side), np.zeros(dim), 2)
    group_centers = group_centers - group_centers[0]

    points = np.empty((k * n_per_cluster, dim))
    labels = np.repeat(np.arange(k, dtype=np.int64), n_per_cluster)
    for g in range(groups):
        for v, signs in enumerate(_VERTEX_SIGNS):
            cluster = 4 * g + v
            vertex = group_centers[g].copy()
            vertex[:2] += signs * a / 2.0
            direction = np.zeros(dim)
            direction[:2] = -signs / math.sqrt(2.0)
            x = truncated_exponential(stream(seed, 1 + cluster), b, n_per_cluster)
            rows = slice(cluster * n_per_cluster, (cluster + 1) * n_per_cluster)
            points[rows] = vertex + x[:, None] * direction

    logger.debug(f"greedy instance: k={k}, m={m_samples}, a={a:.6g}, side={side:.6g}")
    return Dataset(points=points, labels=labels)
