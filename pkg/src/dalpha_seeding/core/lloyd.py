"""
Lloyd refinement of a seeded center set.
"""

from typing import Optional, Tuple

import numpy as np

from dalpha_seeding.config import get_config
from dalpha_seeding.core.models import CenterSet, Dataset, LloydResult
from dalpha_seeding.exceptions import UsageError
from dalpha_seeding.utils.logging import get_logger

logger = get_logger(__name__)


def _assign(points: np.ndarray, centers: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Nearest center of every point (lowest index on ties) and its squared distance."""
    dist = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    assignment = np.argmin(dist, axis=1)
    return assignment, dist[np.arange(points.shape[0]), assignment]


def _update(
    points: np.ndarray, centers: np.ndarray, assignment: np.ndarray, nearest_sq: np.ndarray
) -> np.ndarray:
    """Centroid update; empty clusters move to the farthest points."""
    k, d = centers.shape
    counts = np.bincount(assignment, minlength=k)
    sums = np.zeros((k, d))
    np.add.at(sums, assignment, points)

    updated = centers.copy()
    alive = counts > 0
    updated[alive] = sums[alive] / counts[alive, None]

    empty = np.flatnonzero(~alive)
    if empty.size:
        # stable sort keeps the lowest index first among equal distances
        order = np.argsort(-nearest_sq, kind="stable")
        for cluster, point in zip(empty, order):
            if nearest_sq[point] == 0.0:
                break
            updated[cluster] = points[point]
        logger.warning(f"Lloyd re-seeded {empty.size} empty cluster(s)")
    return updated


def lloyd_from_centers(
    ds: Dataset,
    centers: np.ndarray,
    max_iters: Optional[int] = None,
    tol: Optional[float] = None,
) -> LloydResult:
    """
    Run Lloyd's algorithm from arbitrary real starting centers.

    Every iteration updates centroids and then reassigns points. The loop
    stops once the relative cost decrease falls below ``tol``, once the cost
    reaches zero, or after ``max_iters`` iterations.

    Args:
        ds: Dataset to cluster
        centers: ``(k, d)`` starting centers
        max_iters: Iteration cap (config default when None)
        tol: Relative decrease threshold (config default when None)

    Returns:
        LloydResult with the final centers, assignment and cost history
    """
    lloyd_config = get_config().lloyd
    max_iters = lloyd_config.max_iters if max_iters is None else max_iters
    tol = lloyd_config.tol if tol is None else tol

    current = np.array(centers, dtype=np.float64, copy=True)
    if current.ndim == 1:
        current = current.reshape(-1, 1)
    if current.ndim != 2 or current.shape[0] < 1 or current.shape[1] != ds.d:
        raise UsageError(
            "starting centers must be a (k, d) array with k >= 1", {"shape": current.shape}
        )

    points = ds.points
    assignment, nearest_sq = _assign(points, current)
    cost = float(nearest_sq.sum())
    history = [cost]
    iterations = 0
    converged = False

    while iterations < max_iters:
        iterations += 1
        current = _update(points, current, assignment, nearest_sq)
        assignment, nearest_sq = _assign(points, current)
        previous, cost = cost, float(nearest_sq.sum())
        history.append(cost)
        if cost == 0.0 or previous - cost < tol * previous:
            converged = True
            break

    logger.debug(
        f"Lloyd finished after {iterations} iteration(s), cost {cost:.6g}, converged={converged}"
    )
    return LloydResult(
        final_centers=current,
        assignment=assignment.astype(np.int64),
        iterations=iterations,
        final_cost2=cost,
        converged=converged,
        cost_history=history,
    )


def lloyd_run(
    ds: Dataset,
    initial: CenterSet,
    max_iters: Optional[int] = None,
    tol: Optional[float] = None,
) -> LloydResult:
    """Lloyd refinement starting from the points of a seeded center set."""
    if not initial.centers:
        raise UsageError("Lloyd needs at least one starting center")
    return lloyd_from_centers(ds, ds.points[initial.centers], max_iters=max_iters, tol=tol)
