"""
Seeding procedures: D^alpha sampling, greedy k-means++ and uniform.

Each procedure picks the first center uniformly and then grows a shared
CenterSet one point at a time. Randomness comes only from the generator
passed in (or from ``stream(config.rng_seed)``), so a run is fully determined
by its configuration and seed.
"""

import math
from typing import Callable, List, Optional, Tuple

import numpy as np

from dalpha_seeding.constants import SeedEvent, SeedingMethod
from dalpha_seeding.core.geometry import add_center
from dalpha_seeding.core.models import CenterSet, Dataset, SeedingConfig, SeedingTrace
from dalpha_seeding.exceptions import ExhaustedError, UsageError
from dalpha_seeding.utils.logging import get_logger
from dalpha_seeding.utils.rng import stream

logger = get_logger(__name__)

# Called after every center insertion with the updated set and the new index
SeedingObserver = Callable[[CenterSet, int], None]


def _sampling_weights(cs: CenterSet, alpha: float) -> np.ndarray:
    """
    Unnormalized D^alpha weights, rescaled so the largest weight is 1.

    Points at distance zero get weight zero. When every non-center is at
    distance zero the weights are uniform over the non-centers.
    """
    if not cs.centers:
        raise UsageError("D^alpha sampling needs at least one center")
    if cs.is_center.all():
        raise ExhaustedError("every point is already a center", {"n": cs.n})

    sq = cs.nearest_sq
    top = float(sq.max())
    if top == 0.0:
        return (~cs.is_center).astype(np.float64)
    if math.isinf(alpha):
        weights = np.zeros(cs.n)
        weights[int(np.argmax(sq))] = 1.0
        return weights
    positive = sq > 0.0
    weights = np.zeros(cs.n)
    weights[positive] = (sq[positive] / top) ** (alpha / 2.0)
    return weights


def dalpha_probabilities(cs: CenterSet, alpha: float) -> np.ndarray:
    """
    Probability of each point being chosen as the next center.

    ``nearest_sq[z] ** (alpha / 2) / sum_x nearest_sq[x] ** (alpha / 2)``,
    evaluated after dividing every distance by the largest one. ``alpha = inf``
    puts all mass on the farthest point (lowest index on ties).

    Raises:
        UsageError: If the center set is empty
        ExhaustedError: If every point is already a center
    """
    weights = _sampling_weights(cs, alpha)
    return weights / weights.sum()


def _draw(weights: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw of one index; zero-weight indices are never returned."""
    cumulative = np.cumsum(weights)
    u = rng.random() * cumulative[-1]
    index = int(np.searchsorted(cumulative, u, side="right"))
    if index >= weights.shape[0]:
        index = int(np.flatnonzero(weights > 0.0)[-1])
    return index


def dalpha_step(ds: Dataset, cs: CenterSet, alpha: float, rng: np.random.Generator) -> int:
    """
    Sample the next center index from the D^alpha distribution.

    With ``alpha = inf`` the farthest point is returned and no randomness is used.
    """
    if cs.n != ds.n:
        raise UsageError("center set does not belong to this dataset")
    weights = _sampling_weights(cs, alpha)
    if math.isinf(alpha) and cs.nearest_sq.max() > 0.0:
        return int(np.argmax(weights))
    return _draw(weights, rng)


def _check_k(ds: Dataset, config: SeedingConfig) -> None:
    if config.k > ds.n:
        raise UsageError("k exceeds the number of points", {"k": config.k, "n": ds.n})


def _build_trace(ds: Dataset, config: SeedingConfig, centers: List[int]) -> SeedingTrace:
    clusters: Optional[List[int]] = None
    events: Optional[List[SeedEvent]] = None
    if ds.labels is not None:
        clusters = [int(ds.labels[z]) for z in centers]
        seen: set = set()
        events = []
        for cluster in clusters:
            events.append(SeedEvent.HIT if cluster in seen else SeedEvent.NEW)
            seen.add(cluster)
    return SeedingTrace(
        method=config.method,
        alpha=config.alpha,
        k=config.k,
        n_points=ds.n,
        rng_seed=config.rng_seed,
        centers=list(centers),
        clusters=clusters,
        events=events,
        n_clusters=ds.k,
    )


def _insert(cs: CenterSet, z: int, observer: Optional[SeedingObserver]) -> None:
    add_center(cs, z)
    if observer is not None:
        observer(cs, z)


def seed(
    ds: Dataset,
    config: SeedingConfig,
    rng: Optional[np.random.Generator] = None,
    observer: Optional[SeedingObserver] = None,
) -> Tuple[CenterSet, SeedingTrace]:
    """
    D^alpha seeding.

    The first center is uniform over all points, the remaining ``k - 1`` are
    drawn with :func:`dalpha_step`.

    Args:
        ds: Dataset to seed
        config: Seeding parameters (``alpha``, ``k``, ``rng_seed``)
        rng: Generator to draw from; defaults to ``stream(config.rng_seed)``
        observer: Optional callback run after every insertion

    Returns:
        The final center set and the per-step trace

    Raises:
        UsageError: If ``k > n``
    """
    _check_k(ds, config)
    rng = rng if rng is not None else stream(config.rng_seed)
    cs = CenterSet.empty(ds)

    _insert(cs, int(rng.integers(ds.n)), observer)
    for _ in range(config.k - 1):
        _insert(cs, dalpha_step(ds, cs, config.alpha, rng), observer)

    logger.debug(f"D^{config.alpha} seeding chose {len(cs.centers)} centers")
    return cs, _build_trace(ds, config, cs.centers)


def candidate_costs(cs: CenterSet, candidates: np.ndarray) -> np.ndarray:
    """``cost^(2)(X, Z + {c})`` for every candidate index ``c``."""
    points = cs.points
    costs = np.empty(candidates.shape[0])
    for i, c in enumerate(candidates):
        dist = ((points - points[c]) ** 2).sum(axis=1)
        costs[i] = np.minimum(cs.nearest_sq, dist).sum()
    return costs


def greedy_seed(
    ds: Dataset,
    config: SeedingConfig,
    rng: Optional[np.random.Generator] = None,
    observer: Optional[SeedingObserver] = None,
) -> Tuple[CenterSet, SeedingTrace]:
    """
    Greedy k-means++.

    Each step draws ``config.candidates`` indices i.i.d. (with replacement)
    from the D^2 distribution and keeps the one that lowers ``cost^(2)`` the
    most, lowest point index on ties. With one candidate the run consumes the
    random stream exactly like D^2 seeding.
    """
    _check_k(ds, config)
    rng = rng if rng is not None else stream(config.rng_seed)
    m = config.candidates
    cs = CenterSet.empty(ds)

    _insert(cs, int(rng.integers(ds.n)), observer)
    for _ in range(config.k - 1):
        weights = _sampling_weights(cs, 2.0)
        drawn = np.array([_draw(weights, rng) for _ in range(m)], dtype=np.int64)
        candidates = np.unique(drawn)
        costs = candidate_costs(cs, candidates)
        # np.unique sorts, so argmin's first hit is the lowest index
        _insert(cs, int(candidates[int(np.argmin(costs))]), observer)

    logger.debug(f"greedy seeding (m={m}) chose {len(cs.centers)} centers")
    return cs, _build_trace(ds, config, cs.centers)


def uniform_seed(
    ds: Dataset,
    config: SeedingConfig,
    rng: Optional[np.random.Generator] = None,
    observer: Optional[SeedingObserver] = None,
) -> Tuple[CenterSet, SeedingTrace]:
    """``k`` distinct centers chosen uniformly without replacement."""
    _check_k(ds, config)
    rng = rng if rng is not None else stream(config.rng_seed)
    cs = CenterSet.empty(ds)
    for z in rng.choice(ds.n, size=config.k, replace=False):
        _insert(cs, int(z), observer)
    return cs, _build_trace(ds, config, cs.centers)


_seeding_registry = {
    SeedingMethod.DALPHA: seed,
    SeedingMethod.GREEDY: greedy_seed,
    SeedingMethod.UNIFORM: uniform_seed,
}


def run_seeding(
    ds: Dataset,
    config: SeedingConfig,
    rng: Optional[np.random.Generator] = None,
    observer: Optional[SeedingObserver] = None,
) -> Tuple[CenterSet, SeedingTrace]:
    """Run the procedure selected by ``config.method``."""
    return _seeding_registry[config.method](ds, config, rng=rng, observer=observer)
