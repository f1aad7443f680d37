"""
Experiment service for dalpha-seeding.

This service runs alpha sweeps: for every trial it builds (or reuses) the
instance, seeds it with every configured (alpha, method) pair, optionally
refines the result with Lloyd's algorithm and records the cost ratios against
the reference clustering. Trials run in a joblib work pool; results come back
in (alpha, method, trial) order whatever the number of workers.
"""

import math
from typing import Iterable, List, Optional, Tuple

import polars as pl
from joblib import Parallel, delayed
from rich.console import Console
from rich.progress import (
    BarColumn,
    Progress,
    SpinnerColumn,
    TaskProgressColumn,
    TextColumn,
    TimeElapsedColumn,
)

from dalpha_seeding.config import get_config
from dalpha_seeding.constants import SeedingMethod
from dalpha_seeding.core.diagnostics import sigma_stats
from dalpha_seeding.core.geometry import total_cost
from dalpha_seeding.core.lloyd import lloyd_run
from dalpha_seeding.core.models import (
    Dataset,
    ExperimentConfig,
    ExperimentOutcome,
    LemmaReport,
    SeedingConfig,
    SummaryRow,
    TrialResult,
)
from dalpha_seeding.core.potential import verify_run
from dalpha_seeding.core.seeding import run_seeding
from dalpha_seeding.exceptions import LemmaViolationError, UsageError
from dalpha_seeding.instances import create_instance
from dalpha_seeding.utils.logging import get_logger
from dalpha_seeding.utils.rng import derive_seed, stream

logger = get_logger(__name__)
console = Console(stderr=True)

TrialOutput = Tuple[List[TrialResult], LemmaReport]


def _ratio(cost: float, opt: float) -> float:
    return cost / opt if opt > 0.0 else math.nan


def _lemmas_apply(config: ExperimentConfig, ds: Dataset, alpha: float, k: int) -> bool:
    """The potential suite needs a full D^alpha run with one center per cluster."""
    return (
        config.check_lemmas
        and k == ds.k
        and math.isfinite(alpha)
        and alpha >= 2.0
    )


def _run_trial(config: ExperimentConfig, ds: Optional[Dataset], trial: int) -> TrialOutput:
    """
    Every (alpha, method) pair of one trial.

    All pairs draw from ``stream(base_seed, trial)``, so within a trial the
    methods are compared on common random numbers.
    """
    if ds is None:
        spec = config.instance.model_copy(
            update={"rng_seed": derive_seed(config.instance.rng_seed, trial)}
        )
        ds = create_instance(spec)
    if not ds.has_labels:
        raise UsageError("cost ratios need a labeled dataset")

    k = config.k or int(ds.k)
    opt = sigma_stats(ds).opt_cost
    report = LemmaReport()
    results: List[TrialResult] = []

    for alpha in config.alphas:
        for method in config.methods:
            seeding = SeedingConfig(
                alpha=alpha,
                k=k,
                method=method,
                m_candidates=config.m_candidates,
                rng_seed=config.base_seed,
            )
            cs, trace = run_seeding(ds, seeding, rng=stream(config.base_seed, trial))
            seed_cost2 = total_cost(cs, 2.0)
            result = TrialResult(
                alpha=alpha,
                method=method,
                trial=trial,
                seed_cost2=seed_cost2,
                seed_ratio=_ratio(seed_cost2, opt),
                undiscovered=trace.undiscovered or 0,
            )

            if config.run_lloyd:
                refined = lloyd_run(
                    ds, cs, max_iters=config.lloyd_max_iters, tol=config.lloyd_tol
                )
                result.lloyd_cost2 = refined.final_cost2
                result.lloyd_ratio = _ratio(refined.final_cost2, opt)
                result.lloyd_iters = refined.iterations

            if method == SeedingMethod.DALPHA and _lemmas_apply(config, ds, alpha, k):
                run_report = verify_run(ds, trace)
                result.lemma_flags = ";".join(
                    check.name for check in run_report.checks if check.violations
                )
                report.merge(run_report)

            results.append(result)

    logger.debug(f"trial {trial} finished ({len(results)} run(s))")
    return results, report


def _order_key(config: ExperimentConfig, result: TrialResult) -> Tuple[int, int, int]:
    alpha_rank = next(i for i, a in enumerate(config.alphas) if a == result.alpha)
    return alpha_rank, config.methods.index(result.method), result.trial


def summarize(results: Iterable[TrialResult]) -> List[SummaryRow]:
    """
    Mean, standard deviation and standard error of the ratios per
    (alpha, method), in first-seen order.
    """
    rows = [
        {
            "alpha": r.alpha,
            "method": r.method.value,
            "seed_ratio": r.seed_ratio,
            "lloyd_ratio": r.lloyd_ratio,
            "lloyd_iters": r.lloyd_iters,
            "undiscovered": r.undiscovered,
        }
        for r in results
    ]
    if not rows:
        return []

    df = pl.DataFrame(
        rows,
        schema={
            "alpha": pl.Float64,
            "method": pl.String,
            "seed_ratio": pl.Float64,
            "lloyd_ratio": pl.Float64,
            "lloyd_iters": pl.Int64,
            "undiscovered": pl.Int64,
        },
    )
    grouped = df.group_by(["alpha", "method"], maintain_order=True).agg(
        pl.len().alias("trials"),
        pl.col("seed_ratio").mean().alias("mean_seed_ratio"),
        pl.col("seed_ratio").std(ddof=1).alias("std_seed_ratio"),
        pl.col("lloyd_ratio").mean().alias("mean_lloyd_ratio"),
        pl.col("lloyd_ratio").std(ddof=1).alias("std_lloyd_ratio"),
        pl.col("lloyd_iters").cast(pl.Float64).mean().alias("mean_lloyd_iters"),
        pl.col("undiscovered").cast(pl.Float64).mean().alias("mean_undiscovered"),
    )

    summary = []
    for row in grouped.iter_rows(named=True):
        trials = int(row["trials"])
        std_seed = row["std_seed_ratio"] if trials > 1 else 0.0
        mean_lloyd = row["mean_lloyd_ratio"]
        std_lloyd = None
        if mean_lloyd is not None:
            std_lloyd = row["std_lloyd_ratio"] if trials > 1 else 0.0
        summary.append(
            SummaryRow(
                alpha=row["alpha"],
                method=row["method"],
                trials=trials,
                mean_seed_ratio=row["mean_seed_ratio"],
                std_seed_ratio=std_seed,
                sem_seed_ratio=std_seed / math.sqrt(trials),
                mean_lloyd_ratio=mean_lloyd,
                std_lloyd_ratio=std_lloyd,
                sem_lloyd_ratio=None if std_lloyd is None else std_lloyd / math.sqrt(trials),
                mean_lloyd_iters=row["mean_lloyd_iters"],
                mean_undiscovered=row["mean_undiscovered"],
            )
        )
    return summary


class ExperimentService:
    """
    Service for running alpha sweeps.

    Attributes:
        config (ExperimentConfig): The sweep being run.
        workers (int): Number of joblib workers.
    """

    def __init__(self, config: ExperimentConfig, workers: Optional[int] = None):
        self.config = config
        self.workers = workers or config.workers or get_config().experiment.workers
        self._resample = config.resample_per_trial and config.instance.is_stochastic
        if config.resample_per_trial and not self._resample:
            logger.warning(
                f"{config.instance.family.value} instances are fixed; resample_per_trial ignored"
            )
        logger.info(
            f"Experiment: {config.instance.family.value}, {len(config.alphas)} alpha(s), "
            f"{len(config.methods)} method(s), {config.trials} trial(s), {self.workers} worker(s)"
        )

    def _trial_outputs(self, ds: Optional[Dataset]) -> Iterable[TrialOutput]:
        if self.workers == 1:
            return (_run_trial(self.config, ds, t) for t in range(self.config.trials))
        return Parallel(n_jobs=self.workers, return_as="generator")(
            delayed(_run_trial)(self.config, ds, t) for t in range(self.config.trials)
        )

    def _absorb(
        self, output: TrialOutput, results: List[TrialResult], report: LemmaReport
    ) -> None:
        """Collect one trial; stop the sweep at the first failing lemma check."""
        trial_results, trial_report = output
        results.extend(trial_results)
        report.merge(trial_report)
        if not trial_report.passed:
            flagged = [check.name for check in trial_report.checks if check.violations]
            trial = trial_results[0].trial if trial_results else None
            logger.error(f"lemma checks failed on trial {trial}: {flagged}")
            raise LemmaViolationError(
                f"{report.violations} lemma violation(s)",
                report=report,
                details={"checks": flagged, "trial": trial},
            )

    def run(self, show_progress: bool = False) -> ExperimentOutcome:
        """
        Run every trial and summarise.

        Args:
            show_progress: Whether to display a progress bar

        Returns:
            ExperimentOutcome with ordered results and the per-(alpha, method) summary

        Raises:
            UsageError: If the instance is unlabeled or ``k`` exceeds its size
            StorageError: If a CSV instance cannot be read
            LemmaViolationError: If lemma checks are enabled and a trial fails one;
                remaining trials are abandoned
        """
        ds = None if self._resample else create_instance(self.config.instance)
        results: List[TrialResult] = []
        report = LemmaReport()

        if show_progress:
            with Progress(
                SpinnerColumn(),
                TextColumn("[progress.description]{task.description}", justify="right"),
                BarColumn(bar_width=None),
                TaskProgressColumn(),
                TimeElapsedColumn(),
                console=console,
                transient=False,
            ) as progress:
                task = progress.add_task("[cyan]Running trials...", total=self.config.trials)
                for output in self._trial_outputs(ds):
                    self._absorb(output, results, report)
                    progress.advance(task)
        else:
            for output in self._trial_outputs(ds):
                self._absorb(output, results, report)

        results.sort(key=lambda r: _order_key(self.config, r))
        summary = summarize(results)
        logger.info(f"Experiment finished: {len(results)} run(s)")
        return ExperimentOutcome(results=results, summary=summary)


def run_experiment(
    config: ExperimentConfig, workers: Optional[int] = None, show_progress: bool = False
) -> ExperimentOutcome:
    """Run the sweep described by ``config``."""
    return ExperimentService(config, workers=workers).run(show_progress=show_progress)
