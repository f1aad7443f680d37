"""
Instance parameters and approximation bounds.

This module measures the quantities the D^alpha analysis is stated in:
per-cluster standard deviations, the concentration moment g_alpha, size
classes and the bound expressions built from them.
"""

import math
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np

from dalpha_seeding.config import get_config
from dalpha_seeding.constants import LEMMA_RELATIVE_SLACK, PAIRWISE_BLOCK_ROWS
from dalpha_seeding.core.geometry import total_cost
from dalpha_seeding.core.models import (
    BoundReport,
    CenterSet,
    Dataset,
    GAlphaResult,
    LemmaCheck,
    LloydResult,
    ParamReport,
    SigmaStats,
    WeightClasses,
)
from dalpha_seeding.exceptions import UsageError
from dalpha_seeding.utils.logging import get_logger
from dalpha_seeding.utils.rng import stream

logger = get_logger(__name__)


def cluster_centroids(ds: Dataset) -> np.ndarray:
    """``(k, d)`` matrix of reference-cluster centroids."""
    labels = ds.require_labels()
    sizes = np.bincount(labels)
    sums = np.zeros((sizes.shape[0], ds.d))
    np.add.at(sums, labels, ds.points)
    return sums / sizes[:, None]


def _cluster_sse(ds: Dataset) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sizes, centroids and ``cost^(2)(C, mu_C)`` of every cluster (two-pass)."""
    labels = ds.require_labels()
    sizes = np.bincount(labels)
    centroids = cluster_centroids(ds)
    residual = ((ds.points - centroids[labels]) ** 2).sum(axis=1)
    sse = np.bincount(labels, weights=residual, minlength=sizes.shape[0])
    return sizes, centroids, sse


def sigma_stats(ds: Dataset) -> SigmaStats:
    """
    Per-cluster deviation ``sigma_C`` around the centroid and the reference cost.

    A zero ``sigma_min`` yields an infinite ratio, flagged rather than raised.
    """
    sizes, _, sse = _cluster_sse(ds)
    sigma = np.sqrt(sse / sizes)
    sigma_max = float(sigma.max())
    sigma_min = float(sigma.min())
    if sigma_min > 0.0:
        ratio = sigma_max / sigma_min
        infinite = False
    else:
        logger.warning("sigma_min is zero; sigma ratio reported as infinite")
        ratio = math.inf
        infinite = True
    return SigmaStats(
        sizes=sizes.tolist(),
        sigma=sigma.tolist(),
        sigma_max=sigma_max,
        sigma_min=sigma_min,
        sigma_ratio=ratio,
        ratio_infinite=infinite,
        opt_cost=float(sse.sum()),
    )


def _pairwise_sq(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared distances between the rows of ``a`` and ``b``."""
    sq = (a * a).sum(axis=1)[:, None] + (b * b).sum(axis=1)[None, :] - 2.0 * (a @ b.T)
    return np.maximum(sq, 0.0)


def _normalized_clusters(
    ds: Dataset,
) -> Iterator[Tuple[int, Optional[np.ndarray]]]:
    """
    Yield ``(cluster, q)`` where ``q`` holds the cluster's points centered and
    divided by ``sigma_C``; ``q`` is None for clusters with fewer than two
    points or zero variance.
    """
    labels = ds.require_labels()
    sizes, centroids, sse = _cluster_sse(ds)
    for c in range(sizes.shape[0]):
        if sizes[c] < 2 or sse[c] == 0.0:
            yield c, None
            continue
        sigma = math.sqrt(sse[c] / sizes[c])
        yield c, (ds.points[labels == c] - centroids[c]) / sigma


def _moment_ratio(q: np.ndarray, alpha: float, z_rows: np.ndarray) -> float:
    """``(1 / (|C| |S|)) * sum_{z in S} sum_{x in C} ||x - z||^alpha`` in normalized units."""
    total = 0.0
    for start in range(0, z_rows.shape[0], PAIRWISE_BLOCK_ROWS):
        block = q[z_rows[start : start + PAIRWISE_BLOCK_ROWS]]
        total += float((_pairwise_sq(block, q) ** (alpha / 2.0)).sum())
    return total / (q.shape[0] * z_rows.shape[0])


def cluster_moment(points: np.ndarray, alpha: float) -> Optional[float]:
    """Exact g_alpha contribution of a single cluster; None when undefined (0/0)."""
    points = np.asarray(points, dtype=np.float64).reshape(len(points), -1)
    if points.shape[0] < 2:
        return None
    centered = points - points.mean(axis=0)
    sse = float((centered**2).sum())
    if sse == 0.0:
        return None
    q = centered / math.sqrt(sse / points.shape[0])
    return _moment_ratio(q, alpha, np.arange(points.shape[0]))


def g_alpha(ds: Dataset, alpha: float, exact: bool = False) -> GAlphaResult:
    """
    Concentration moment ``g_alpha``.

    For every cluster, the average of ``||x - z||^alpha`` over all pairs
    ``(x, z)`` of the cluster divided by ``sigma_C^alpha``; ``g_alpha`` is the
    maximum over clusters. Clusters with fewer than two points or zero
    variance are excluded. Above the configured size threshold the ``z`` side
    is subsampled (unless ``exact``) and the result is flagged approximate.

    Raises:
        UsageError: If ``alpha < 2`` or the dataset is unlabeled
    """
    if not alpha >= 2.0 or math.isinf(alpha):
        raise UsageError("g_alpha needs a finite alpha >= 2", {"alpha": alpha})
    settings = get_config().diagnostics

    per_cluster: List[Optional[float]] = []
    excluded: List[int] = []
    approximate = False
    for c, q in _normalized_clusters(ds):
        if q is None:
            excluded.append(c)
            per_cluster.append(None)
            continue
        m = q.shape[0]
        if not exact and m > settings.galpha_exact_threshold:
            z_rows = np.sort(
                stream(0, c).choice(m, size=min(settings.galpha_sample_size, m), replace=False)
            )
            approximate = True
        else:
            z_rows = np.arange(m)
        per_cluster.append(_moment_ratio(q, alpha, z_rows))

    if excluded:
        logger.warning(f"g_alpha: excluded {len(excluded)} cluster(s) with undefined ratio (0/0)")
    values = [v for v in per_cluster if v is not None]
    return GAlphaResult(
        alpha=alpha,
        value=max(values) if values else None,
        per_cluster=per_cluster,
        excluded=excluded,
        approximate=approximate,
    )


def standardized_moment_bound(ds: Dataset, alpha: float) -> Optional[float]:
    """
    ``2^(alpha+1)`` times the largest standardized alpha-moment
    ``(1/|C|) sum ||x - mu_C||^alpha / sigma_C^alpha``; an upper bound on g_alpha.
    """
    moments = [
        float((np.sqrt((q * q).sum(axis=1)) ** alpha).mean())
        for _, q in _normalized_clusters(ds)
        if q is not None
    ]
    if not moments:
        return None
    return 2.0 ** (alpha + 1.0) * max(moments)


def weight_classes(ds: Dataset) -> WeightClasses:
    """Group clusters by size class ``i`` with ``|C|`` in ``[2^i, 2^(i+1))``."""
    sizes = ds.cluster_sizes()
    cluster_class = [int(s).bit_length() - 1 for s in sizes]
    members: dict = {}
    for c, i in enumerate(cluster_class):
        members.setdefault(i, []).append(c)
    members = dict(sorted(members.items()))
    return WeightClasses(
        histogram={i: len(cs) for i, cs in members.items()},
        members=members,
        cluster_class=cluster_class,
        ell=len(members),
    )


# --------------------------------------------------------------------------
# Bound expressions
# --------------------------------------------------------------------------


def _require_alpha_above_two(alpha: float) -> None:
    if not alpha > 2.0 or math.isinf(alpha):
        raise UsageError("the bound is defined for finite alpha > 2", {"alpha": alpha})


def f_alpha(alpha: float) -> float:
    """``alpha^2 / (alpha/2 - 1)^(2/alpha + 1)``."""
    _require_alpha_above_two(alpha)
    return alpha**2 / (alpha / 2.0 - 1.0) ** (2.0 / alpha + 1.0)


def h_alpha(alpha: float) -> float:
    """Per-step potential increase constant ``(alpha/2 - 1)^(1 - 2/alpha) / (alpha/2)``."""
    _require_alpha_above_two(alpha)
    return (alpha / 2.0 - 1.0) ** (1.0 - 2.0 / alpha) / (alpha / 2.0)


def potential_global_constant(alpha: float) -> float:
    """Constant bounding the final expected potential per unit of the instance factor."""
    _require_alpha_above_two(alpha)
    base = (alpha / 2.0 - 1.0) ** (1.0 - 2.0 / alpha) / (alpha / 2.0 - 1.0)
    power = 2.0 ** (2.0 / alpha - 1.0)
    return 16.0 * base * (2.0 - power) / (1.0 - power)


def hit_cost_factor(alpha: float, g: float) -> float:
    """``4e + (alpha + 1)^2 * g^(2/alpha)``: expected cost factor of a hit cluster."""
    return 4.0 * math.e + (alpha + 1.0) ** 2 * g ** (2.0 / alpha)


def _check_bound_inputs(g: float, sigma_ratio: float, ell: int, k: int) -> None:
    if g < 0 or ell < 0 or k < 1:
        raise UsageError("bound inputs must be non-negative and k >= 1", {"g": g, "ell": ell, "k": k})
    if not sigma_ratio >= 1.0:
        raise UsageError("sigma ratio must be >= 1", {"sigma_ratio": sigma_ratio})


def theorem_bound(alpha: float, g: float, sigma_ratio: float, ell: int, k: int) -> float:
    """
    ``f(alpha) * g^(2/alpha) * ratio^(2 - 4/alpha) * min(ell, log2 k)^(2/alpha)``.

    The approximation bound without its absolute constant.

    Raises:
        UsageError: If ``alpha <= 2`` or an input is out of range
    """
    _require_alpha_above_two(alpha)
    _check_bound_inputs(g, sigma_ratio, ell, k)
    classes = min(float(ell), math.log2(k))
    return (
        f_alpha(alpha)
        * g ** (2.0 / alpha)
        * sigma_ratio ** (2.0 - 4.0 / alpha)
        * classes ** (2.0 / alpha)
    )


def explicit_bound(alpha: float, g: float, sigma_ratio: float, ell: int, k: int) -> float:
    """
    Bound with every constant spelled out:
    ``hit_cost_factor + 2 * P(alpha) * g^(2/alpha) * ratio^(2 - 4/alpha) * m^(2/alpha)``
    with ``m = min(ell, 1 + log2 k)`` and ``P`` the potential constant.
    """
    _require_alpha_above_two(alpha)
    _check_bound_inputs(g, sigma_ratio, ell, k)
    classes = min(float(ell), 1.0 + math.log2(k))
    potential = (
        potential_global_constant(alpha)
        * g ** (2.0 / alpha)
        * sigma_ratio ** (2.0 - 4.0 / alpha)
        * classes ** (2.0 / alpha)
    )
    return hit_cost_factor(alpha, g) + 2.0 * potential


def bound_report(alpha: float, g: float, sigma_ratio: float, ell: int, k: int) -> BoundReport:
    """Both bound forms together with their constants."""
    return BoundReport(
        alpha=alpha,
        f_alpha=f_alpha(alpha),
        h_alpha=h_alpha(alpha),
        potential_constant=potential_global_constant(alpha),
        hit_cost_factor=hit_cost_factor(alpha, g),
        bound_value=theorem_bound(alpha, g, sigma_ratio, ell, k),
        explicit_bound=explicit_bound(alpha, g, sigma_ratio, ell, k),
    )


# --------------------------------------------------------------------------
# Reports
# --------------------------------------------------------------------------


def cost_ratio(ds: Dataset, solution: Union[CenterSet, LloydResult]) -> float:
    """
    ``cost^(2)`` of a solution divided by the reference clustering cost.

    Returns NaN (with a warning) when the reference cost is zero.
    """
    opt = sigma_stats(ds).opt_cost
    if isinstance(solution, LloydResult):
        cost = solution.final_cost2
    else:
        cost = total_cost(solution, 2.0)
    if opt == 0.0:
        logger.warning("reference clustering cost is zero; cost ratio undefined")
        return math.nan
    return cost / opt


def param_report(ds: Dataset, alpha: float, exact: bool = False) -> ParamReport:
    """Measure every instance parameter of a labeled dataset for ``alpha``."""
    stats = sigma_stats(ds)
    galpha = g_alpha(ds, alpha, exact=exact)
    classes = weight_classes(ds)
    k = ds.k or 0

    bound_value: Optional[float] = None
    explicit: Optional[float] = None
    if 2.0 < alpha < math.inf and galpha.value is not None and not stats.ratio_infinite:
        bound_value = theorem_bound(alpha, galpha.value, stats.sigma_ratio, classes.ell, k)
        explicit = explicit_bound(alpha, galpha.value, stats.sigma_ratio, classes.ell, k)

    logger.info(
        f"params: k={k}, n={ds.n}, sigma ratio={stats.sigma_ratio:.6g}, "
        f"g_{alpha:g}={galpha.value}, ell={classes.ell}"
    )
    return ParamReport(
        alpha=alpha,
        k=k,
        n=ds.n,
        sizes=stats.sizes,
        sigma=stats.sigma,
        sigma_max=stats.sigma_max,
        sigma_min=stats.sigma_min,
        sigma_ratio=stats.sigma_ratio,
        sigma_ratio_infinite=stats.ratio_infinite,
        g_alpha=galpha.value,
        g_per_cluster=galpha.per_cluster,
        g_excluded=galpha.excluded,
        g_approximate=galpha.approximate,
        standardized_moment_bound=standardized_moment_bound(ds, alpha),
        weight_histogram=classes.histogram,
        ell=classes.ell,
        opt_cost=stats.opt_cost,
        bound_value=bound_value,
        explicit_bound=explicit,
    )


def check_cost_alpha_clusters(ds: Dataset, alpha: float) -> LemmaCheck:
    """
    Check ``cost^(alpha)(C, mu_C) <= g_C * |C| * sigma_C^alpha`` for every cluster.

    ``g_C`` is the cluster's exact contribution to g_alpha. Both sides are
    compared in units of ``sigma_C^alpha``.
    """
    check = LemmaCheck(name="cost_alpha_clusters")
    galpha = g_alpha(ds, alpha, exact=True)
    for c, q in _normalized_clusters(ds):
        g_c = galpha.per_cluster[c]
        if q is None or g_c is None:
            continue
        lhs = float((np.sqrt((q * q).sum(axis=1)) ** alpha).sum())
        rhs = g_c * q.shape[0]
        slack = (rhs - lhs) / rhs
        check.record(slack, slack >= -LEMMA_RELATIVE_SLACK)
    return check
