"""
Distance and cost kernels.

All kernels work on the row-major ``(n, d)`` point matrix of a Dataset and
evaluate squared distances the same way (``((X - c) ** 2).sum(axis=1)``), so
incremental and from-scratch computations agree bit for bit.
"""

import math
from typing import Sequence

import numpy as np

from dalpha_seeding.core.models import CenterSet, ClusterCosts, Dataset
from dalpha_seeding.exceptions import NumericRangeError, UsageError
from dalpha_seeding.utils.logging import get_logger

logger = get_logger(__name__)


def squared_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """
    Squared Euclidean distance between two points.

    Raises:
        UsageError: If the points differ in dimension
    """
    va = np.atleast_1d(np.asarray(a, dtype=np.float64))
    vb = np.atleast_1d(np.asarray(b, dtype=np.float64))
    if va.shape != vb.shape:
        raise UsageError("dimension mismatch", {"a": va.shape, "b": vb.shape})
    return float(((va - vb) ** 2).sum())


def _row_distances(points: np.ndarray, z: int) -> np.ndarray:
    """Squared distance of every point to point ``z``."""
    return ((points - points[z]) ** 2).sum(axis=1)


def add_center(cs: CenterSet, z: int) -> CenterSet:
    """
    Append point ``z`` to the center set and update nearest distances.

    Nearest-center slots only move on strict improvement, so ties keep the
    earlier center. The update is in place; the same object is returned.

    Raises:
        UsageError: If ``z`` is out of range or already a center
    """
    if not 0 <= z < cs.n:
        raise UsageError("center index out of range", {"z": z, "n": cs.n})
    if cs.is_center[z]:
        raise UsageError("point is already a center", {"z": z})

    dist = _row_distances(cs.points, z)
    slot = len(cs.centers)
    better = dist < cs.nearest_sq
    cs.nearest_sq[better] = dist[better]
    cs.nearest_center[better] = slot
    cs.centers.append(int(z))
    cs.is_center[z] = True
    return cs


def recompute_center_set(ds: Dataset, centers: Sequence[int]) -> CenterSet:
    """
    Build the center set for ``centers`` from scratch.

    Used as the brute-force oracle for :func:`add_center`: every distance is
    evaluated at once and the nearest slot is the first argmin.
    """
    cs = CenterSet.empty(ds)
    if len(centers) == 0:
        return cs
    if len(set(int(c) for c in centers)) != len(centers):
        raise UsageError("centers must be distinct")
    stacked = np.stack([_row_distances(ds.points, int(c)) for c in centers], axis=1)
    cs.nearest_center = np.argmin(stacked, axis=1).astype(np.int64)
    cs.nearest_sq = stacked[np.arange(ds.n), cs.nearest_center]
    cs.centers = [int(c) for c in centers]
    cs.is_center[cs.centers] = True
    return cs


def _check_cost_args(cs: CenterSet, power: float) -> None:
    if not power >= 2.0:
        raise UsageError("cost power must be >= 2", {"power": power})
    if not cs.centers:
        raise UsageError("cost needs at least one center")


def log_total_cost(cs: CenterSet, power: float) -> float:
    """
    Natural log of ``sum_x nearest_sq[x] ** (power / 2)``.

    Evaluated after rescaling by the largest nearest distance, so it is finite
    for any power. Returns ``-inf`` when every point is a center.
    """
    _check_cost_args(cs, power)
    top = float(cs.nearest_sq.max())
    if top == 0.0:
        return -math.inf
    scaled = (cs.nearest_sq / top) ** (power / 2.0)
    return 0.5 * power * math.log(top) + math.log(float(scaled.sum()))


def total_cost(cs: CenterSet, power: float = 2.0) -> float:
    """
    ``cost^(power)(X, Z) = sum_x nearest_sq[x] ** (power / 2)``.

    Raises:
        UsageError: If ``power < 2`` or the center set is empty
        NumericRangeError: If the unscaled value overflows a float; the error
            carries the log-domain value
    """
    _check_cost_args(cs, power)
    if power == 2.0:
        return float(cs.nearest_sq.sum())

    with np.errstate(over="ignore"):
        value = float((cs.nearest_sq ** (power / 2.0)).sum())
    if not math.isfinite(value):
        log_value = log_total_cost(cs, power)
        logger.debug(f"cost^({power}) overflows, log value {log_value:.6g}")
        raise NumericRangeError(
            "alpha-cost is not representable as a finite float",
            log_value=log_value,
            details={"power": power},
        )
    return value


def cluster_costs(cs: CenterSet, ds: Dataset, alpha: float) -> ClusterCosts:
    """
    Per-reference-cluster ``cost^(2)`` and ``cost^(alpha)``.

    ``alpha_norm`` holds ``cost_alpha ** (2 / alpha)`` evaluated as
    ``m * (sum (d^2 / m) ** (alpha / 2)) ** (2 / alpha)`` with ``m`` the
    cluster's largest nearest distance, which keeps it finite for large alpha.
    The unscaled ``cost_alpha`` raises NumericRangeError on access once it
    overflows, as ``total_cost`` does.

    Raises:
        UsageError: If the dataset has no labels or the center set is empty
    """
    labels = ds.require_labels()
    if not cs.centers:
        raise UsageError("cluster costs need at least one center")
    k = ds.k or 0
    sq = cs.nearest_sq
    cost2 = np.bincount(labels, weights=sq, minlength=k)

    with np.errstate(over="ignore"):
        raw_cost_alpha = np.bincount(labels, weights=sq ** (alpha / 2.0), minlength=k)

    top = np.zeros(k)
    np.maximum.at(top, labels, sq)
    safe_top = np.where(top > 0.0, top, 1.0)
    scaled = np.bincount(labels, weights=(sq / safe_top[labels]) ** (alpha / 2.0), minlength=k)
    with np.errstate(divide="ignore"):
        log_cost_alpha = np.where(
            top > 0.0, alpha / 2.0 * np.log(safe_top) + np.log(np.maximum(scaled, 1.0)), -np.inf
        )
    if alpha > 0:
        alpha_norm = np.where(top > 0.0, top * scaled ** (2.0 / alpha), 0.0)
    else:
        alpha_norm = np.zeros(k)
    if not np.isfinite(raw_cost_alpha).all():
        logger.debug(f"per-cluster cost^({alpha}) overflows, max log {log_cost_alpha.max():.6g}")
    return ClusterCosts(
        alpha=alpha,
        cost2=cost2,
        raw_cost_alpha=raw_cost_alpha,
        log_cost_alpha=log_cost_alpha,
        alpha_norm=alpha_norm,
    )
