"""
SVG line charts of sweep summaries.

Mean cost ratio against alpha with standard-error bars, one series per
seeding method. Infinite alpha is drawn one grid step past the largest
finite value and labelled with the infinity sign.
"""

import math
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

from matplotlib.figure import Figure

from dalpha_seeding.core.models import SummaryRow
from dalpha_seeding.exceptions import StorageError, UsageError
from dalpha_seeding.utils.logging import get_logger

logger = get_logger(__name__)

_METRICS = {
    "seed": ("mean_seed_ratio", "sem_seed_ratio", "seeding cost / reference cost"),
    "lloyd": ("mean_lloyd_ratio", "sem_lloyd_ratio", "Lloyd cost / reference cost"),
    "lloyd_iters": ("mean_lloyd_iters", None, "Lloyd iterations"),
}


def _x_positions(alphas: Sequence[float]) -> Tuple[Dict[float, float], List[float], List[str]]:
    """Plot coordinate of each alpha, plus tick positions and labels."""
    finite = sorted({a for a in alphas if math.isfinite(a)})
    positions = {a: a for a in finite}
    if any(math.isinf(a) for a in alphas):
        step = finite[-1] - finite[-2] if len(finite) > 1 else 1.0
        positions[math.inf] = (finite[-1] if finite else 0.0) + step
    ticks = sorted(positions.values())
    labels = ["∞" if math.isinf(a) else f"{a:g}" for a in sorted(positions)]
    return positions, ticks, labels


def series_id(method: str) -> str:
    """SVG id of the line drawn for ``method``."""
    return f"series-{method}"


def emit_svg(
    summary: Sequence[SummaryRow],
    path: Union[str, Path],
    metric: str = "seed",
    title: str = "",
) -> None:
    """
    Write a line chart of ``metric`` against alpha.

    Args:
        summary: Rows produced by the experiment service
        path: Output file
        metric: ``seed``, ``lloyd`` or ``lloyd_iters``
        title: Optional chart title

    Raises:
        UsageError: On an empty summary, an unknown metric or a metric with no values
        StorageError: If the file cannot be written
    """
    if not summary:
        raise UsageError("cannot plot an empty summary")
    if metric not in _METRICS:
        raise UsageError(f"unknown metric '{metric}'", {"choices": sorted(_METRICS)})
    mean_field, err_field, ylabel = _METRICS[metric]

    positions, ticks, tick_labels = _x_positions([row.alpha for row in summary])
    series: Dict[str, List[Tuple[float, float, float]]] = {}
    for row in summary:
        mean = getattr(row, mean_field)
        if mean is None:
            continue
        err = getattr(row, err_field) if err_field else 0.0
        series.setdefault(row.method.value, []).append((positions[row.alpha], mean, err or 0.0))
    if not series:
        raise UsageError(f"summary has no values for metric '{metric}'")

    fig = Figure(figsize=(7, 4.5))
    ax = fig.add_subplot()
    for method, points in series.items():
        points.sort()
        xs, ys, errs = zip(*points)
        container = ax.errorbar(xs, ys, yerr=errs, marker="o", capsize=3, label=method)
        container.lines[0].set_gid(series_id(method))
    ax.set_xticks(ticks)
    ax.set_xticklabels(tick_labels)
    ax.set_xlabel("alpha")
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()

    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as e:
        raise StorageError(f"Error writing plot to {path}: {e}", {"path": str(path)}) from e
    logger.info(f"Saved {metric} chart ({len(series)} series) to {path}")
