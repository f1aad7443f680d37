"""
Command-line interface for dalpha-seeding.

Generate instances, seed them, refine with Lloyd, measure instance
parameters, check the potential-function lemmas and run alpha sweeps.
Built with Typer and Rich.
"""

from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table

from dalpha_seeding import __version__
from dalpha_seeding.config import get_config
from dalpha_seeding.constants import (
    EXIT_IO,
    EXIT_LEMMA,
    EXIT_USAGE,
    InstanceFamily,
    InstancePreset,
    SeedingMethod,
)
from dalpha_seeding.core.diagnostics import (
    bound_report,
    check_cost_alpha_clusters,
    cost_ratio,
    param_report,
)
from dalpha_seeding.core.geometry import total_cost
from dalpha_seeding.core.lloyd import lloyd_from_centers
from dalpha_seeding.core.models import (
    Dataset,
    ExperimentConfig,
    InstanceSpec,
    LemmaReport,
    SeedingConfig,
    SeedingTrace,
)
from dalpha_seeding.core.potential import run_state_checks, verify_run
from dalpha_seeding.core.seeding import run_seeding
from dalpha_seeding.data.storage import (
    load_csv,
    load_json,
    save_csv,
    save_json,
    save_results,
    save_summary,
)
from dalpha_seeding.exceptions import (
    DAlphaError,
    LemmaViolationError,
    StorageError,
    UsageError,
)
from dalpha_seeding.instances import create_instance, get_available_families, preset_spec
from dalpha_seeding.services.experiment_service import run_experiment
from dalpha_seeding.services.plotting import emit_svg
from dalpha_seeding.utils.logging import configure_logging, get_logger
from dalpha_seeding.utils.rng import stream
from dalpha_seeding.utils.validators import parse_alpha, validate_file_path

# Initialize Typer app
app = typer.Typer(
    name="dalpha-seeding",
    help="D^alpha seeding for k-means: experiments, diagnostics and lemma checks",
    add_completion=False,
)

console = Console()
err_console = Console(stderr=True)
logger = get_logger(__name__)


def version_callback(value: bool) -> None:
    """Print version information and exit."""
    if value:
        console.print(
            Panel.fit(
                f"[bold]dalpha-seeding[/bold] [cyan]v{__version__}[/cyan]",
                border_style="cyan",
                subtitle="D^alpha seeding for k-means",
            )
        )
        raise typer.Exit()


@contextmanager
def _handle_errors(command: str) -> Iterator[None]:
    """Map package errors to exit codes: 1 usage, 2 I/O, 3 lemma violation."""
    try:
        yield
    except typer.Exit:
        raise
    except LemmaViolationError as e:
        err_console.print(f"[bold red]Lemma violation:[/bold red] {escape(str(e))}")
        logger.error("Lemma violation in {} command: {}", command, e)
        raise typer.Exit(code=EXIT_LEMMA)
    except (StorageError, OSError) as e:
        err_console.print(f"[bold red]Error:[/bold red] {escape(str(e))}")
        logger.opt(exception=e).error("I/O error in {} command: {}", command, e)
        raise typer.Exit(code=EXIT_IO)
    except (UsageError, ValidationError, ValueError) as e:
        err_console.print(f"[bold red]Error:[/bold red] {escape(str(e))}")
        logger.error("Usage error in {} command: {}", command, e)
        raise typer.Exit(code=EXIT_USAGE)
    except DAlphaError as e:
        err_console.print(f"[bold red]Error:[/bold red] {escape(str(e))}")
        logger.opt(exception=e).error("Error in {} command: {}", command, e)
        raise typer.Exit(code=EXIT_USAGE)


def _require_file(path: Path) -> None:
    if not validate_file_path(path):
        raise StorageError(f"file not found: {path}", {"path": str(path)})


def _report_table(report: LemmaReport) -> Table:
    table = Table(show_header=True, header_style="bold cyan")
    table.add_column("Check")
    table.add_column("Checked", justify="right")
    table.add_column("Violations", justify="right")
    table.add_column("Min slack", justify="right")
    for check in report.checks:
        min_slack = "-" if check.min_slack is None else f"{check.min_slack:.3g}"
        style = "red" if check.violations else "green"
        table.add_row(
            check.name,
            str(check.checked),
            f"[{style}]{check.violations}[/{style}]",
            min_slack,
        )
    return table


@app.callback()
def main(
    version: bool = typer.Option(
        False, "--version", "-v", help="Show version and exit", callback=version_callback
    ),
    log_level: Optional[str] = typer.Option(
        None, "--log-level", help="Override LOG_LEVEL (DEBUG, INFO, WARNING, ...)"
    ),
):
    """
    dalpha-seeding - D^alpha seeding for k-means

    Sample centers with probability proportional to the alpha-th power of the
    distance to the nearest chosen center, and study how the choice of alpha
    interacts with the structure of the instance.
    """
    configure_logging(log_level)


@app.command("generate")
def generate_command(
    out: Path = typer.Option(..., "--out", "-o", help="Output CSV"),
    family: Optional[InstanceFamily] = typer.Option(
        None, "--family", "-f", help="Instance family (lower-bound families take their flags)"
    ),
    preset: Optional[InstancePreset] = typer.Option(
        None, "--preset", "-p", help="Benchmark mixture D1..D5"
    ),
    spec: Optional[Path] = typer.Option(None, "--spec", help="InstanceSpec JSON file"),
    n: Optional[int] = typer.Option(None, "--n", help="Number of points"),
    k: Optional[int] = typer.Option(None, "--k", help="Number of clusters"),
    n_per_cluster: Optional[int] = typer.Option(None, "--n-per-cluster", help="Points per cluster"),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Target alpha of the instance"),
    m_samples: Optional[int] = typer.Option(None, "--m", help="Greedy candidates the instance targets"),
    delta: Optional[float] = typer.Option(None, "--delta", help="Half edge length for presets"),
    seed: int = typer.Option(0, "--seed", "-s", help="Instance seed"),
) -> None:
    """
    Generate an instance and write it as CSV.

    Exactly one of --family, --preset or --spec selects the instance.
    """
    with _handle_errors("generate"):
        chosen = [option for option in (family, preset, spec) if option is not None]
        if len(chosen) != 1:
            raise UsageError("give exactly one of --family, --preset or --spec")

        if spec is not None:
            _require_file(spec)
            instance = load_json(spec, InstanceSpec)
        elif preset is not None:
            kwargs = {"seed": seed}
            if n is not None:
                kwargs["n"] = n
            if delta is not None:
                kwargs["delta"] = delta
            instance = preset_spec(preset, **kwargs)
        else:
            instance = InstanceSpec(
                family=family,
                n=n,
                k=k,
                n_per_cluster=n_per_cluster,
                alpha=alpha,
                m_samples=m_samples,
                rng_seed=seed,
            )

        ds = create_instance(instance)
        save_csv(ds, out)
        console.print(
            f"Wrote [cyan]{instance.family.value}[/cyan] instance "
            f"(n={ds.n}, d={ds.d}, k={ds.k}) to {out}"
        )


@app.command("seed")
def seed_command(
    data: Path = typer.Option(..., "--data", "-d", help="Dataset CSV"),
    alpha: str = typer.Option("2", "--alpha", "-a", help="Sampling exponent (inf allowed)"),
    k: Optional[int] = typer.Option(None, "--k", help="Centers (default: cluster count)"),
    method: SeedingMethod = typer.Option(SeedingMethod.DALPHA, "--method", "-m", case_sensitive=False),
    m_candidates: Optional[int] = typer.Option(None, "--candidates", help="Greedy candidates per step"),
    seed: int = typer.Option(0, "--seed", "-s", help="Random seed"),
    trace: Optional[Path] = typer.Option(None, "--trace", help="Write the seeding trace as JSON"),
) -> None:
    """
    Seed a dataset and print the chosen centers and their cost.
    """
    with _handle_errors("seed"):
        ds = load_csv(data)
        centers = k or ds.k
        if centers is None:
            raise UsageError("--k is required for an unlabeled dataset")
        config = SeedingConfig(
            alpha=parse_alpha(alpha), k=centers, method=method, m_candidates=m_candidates, rng_seed=seed
        )
        cs, run_trace = run_seeding(ds, config)

        table = Table(show_header=True, header_style="bold cyan")
        table.add_column("Metric")
        table.add_column("Value")
        table.add_row("Method", method.value)
        table.add_row("Alpha", str(config.alpha))
        table.add_row("Centers", " ".join(str(z) for z in cs.centers))
        table.add_row("cost^(2)", f"{total_cost(cs, 2.0):.10g}")
        if ds.has_labels:
            table.add_row("Cost ratio", f"{cost_ratio(ds, cs):.6g}")
            table.add_row("Undiscovered clusters", str(run_trace.undiscovered))
        console.print(table)

        if trace is not None:
            save_json(run_trace, trace)
            console.print(f"Trace written to {trace}")


@app.command("lloyd")
def lloyd_command(
    data: Path = typer.Option(..., "--data", "-d", help="Dataset CSV"),
    centers: Path = typer.Option(
        ..., "--centers", "-c", help="Seeding trace JSON or CSV of center coordinates"
    ),
    max_iters: Optional[int] = typer.Option(None, "--max-iters", help="Iteration cap"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Relative decrease threshold"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Write final centers as CSV"),
) -> None:
    """
    Refine starting centers with Lloyd's algorithm.
    """
    with _handle_errors("lloyd"):
        ds = load_csv(data)
        _require_file(centers)
        if centers.suffix == ".json":
            start = ds.points[load_json(centers, SeedingTrace).centers]
        else:
            start = load_csv(centers).points
        result = lloyd_from_centers(ds, start, max_iters=max_iters, tol=tol)

        table = Table(show_header=True, header_style="bold cyan")
        table.add_column("Metric")
        table.add_column("Value")
        table.add_row("Iterations", str(result.iterations))
        table.add_row("Converged", str(result.converged))
        table.add_row("Initial cost^(2)", f"{result.cost_history[0]:.10g}")
        table.add_row("Final cost^(2)", f"{result.final_cost2:.10g}")
        if ds.has_labels:
            table.add_row("Cost ratio", f"{cost_ratio(ds, result):.6g}")
        console.print(table)

        if out is not None:
            save_csv(Dataset(points=result.final_centers), out)


@app.command("params")
def params_command(
    data: Path = typer.Option(..., "--data", "-d", help="Labeled dataset CSV"),
    alpha: str = typer.Option(..., "--alpha", "-a", help="Alpha (>= 2)"),
    exact: bool = typer.Option(False, "--exact", help="Never subsample large clusters for g_alpha"),
) -> None:
    """
    Print the instance parameters (ParamReport) as JSON.
    """
    with _handle_errors("params"):
        ds = load_csv(data)
        report = param_report(ds, parse_alpha(alpha), exact=exact)
        typer.echo(report.model_dump_json(indent=2))


@app.command("verify")
def verify_command(
    data: Path = typer.Option(..., "--data", "-d", help="Labeled dataset CSV"),
    alpha: str = typer.Option(..., "--alpha", "-a", help="Alpha (finite, >= 2)"),
    runs: int = typer.Option(50, "--runs", "-r", min=1, help="Complete D^alpha runs to replay"),
    state_checks: int = typer.Option(
        0, "--state-checks", min=0, help="Mid-run states for the exact-expectation checks"
    ),
    seed: int = typer.Option(0, "--seed", "-s", help="Random seed"),
    report_path: Optional[Path] = typer.Option(None, "--report", help="Write the report as JSON"),
) -> None:
    """
    Check the potential-function lemmas on D^alpha runs.

    Exits with code 3 when any check is violated.
    """
    with _handle_errors("verify"):
        ds = load_csv(data)
        value = parse_alpha(alpha)
        ds.require_labels()
        config = SeedingConfig(alpha=value, k=ds.k, rng_seed=seed)

        report = LemmaReport(checks=[check_cost_alpha_clusters(ds, value)])
        for run in range(runs):
            _, trace = run_seeding(ds, config, rng=stream(seed, run))
            report.merge(verify_run(ds, trace))
        if state_checks:
            report.merge(run_state_checks(ds, value, state_checks, seed))

        console.print(_report_table(report))
        if report_path is not None:
            save_json(report, report_path)
        if not report.passed:
            raise LemmaViolationError(f"{report.violations} lemma violation(s)", report=report)
        console.print("[bold green]All checks passed.[/bold green]")


@app.command("sweep")
def sweep_command(
    config_path: Path = typer.Option(..., "--config", "-c", help="ExperimentConfig JSON"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Results CSV (or .parquet)"),
    svg: Optional[Path] = typer.Option(None, "--svg", help="Chart of mean ratio against alpha"),
    summary_path: Optional[Path] = typer.Option(None, "--summary", help="Summary CSV"),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", min=1, help="Parallel workers"),
    quiet: bool = typer.Option(False, "--quiet", "-q", help="Suppress progress output"),
) -> None:
    """
    Run an alpha sweep with repeated trials.
    """
    with _handle_errors("sweep"):
        _require_file(config_path)
        config = load_json(config_path, ExperimentConfig)
        results_path = out or config.output_csv
        if results_path is None:
            results_path = get_config().experiment.output_dir / f"{config_path.stem}.csv"
        svg_path = svg or config.output_svg

        try:
            outcome = run_experiment(config, workers=workers, show_progress=not quiet)
        except LemmaViolationError as e:
            dump = results_path.with_suffix(".lemmas.json")
            save_json(e.report, dump)
            err_console.print(f"Lemma report written to {dump}")
            raise

        save_results(outcome.results, results_path)
        if summary_path is not None:
            save_summary(outcome.summary, summary_path)
        if svg_path is not None:
            emit_svg(outcome.summary, svg_path, title=config.instance.family.value)

        if not quiet:
            table = Table(show_header=True, header_style="bold cyan")
            table.add_column("Alpha", justify="right")
            table.add_column("Method")
            table.add_column("Mean ratio", justify="right")
            table.add_column("SEM", justify="right")
            if config.run_lloyd:
                table.add_column("Mean Lloyd ratio", justify="right")
            table.add_column("Undiscovered", justify="right")
            for row in outcome.summary:
                cells = [
                    f"{row.alpha:g}",
                    row.method.value,
                    f"{row.mean_seed_ratio:.4f}",
                    f"{row.sem_seed_ratio:.4f}",
                ]
                if config.run_lloyd:
                    cells.append(f"{row.mean_lloyd_ratio:.4f}")
                cells.append(f"{row.mean_undiscovered:.2f}")
                table.add_row(*cells)
            console.print(table)
            console.print(f"Results written to {results_path}")


@app.command("bound")
def bound_command(
    alpha: float = typer.Option(..., "--alpha", "-a", help="Alpha (finite, > 2)"),
    g: float = typer.Option(..., "--g", help="g_alpha of the instance"),
    sigma_ratio: float = typer.Option(..., "--sigma-ratio", help="sigma_max / sigma_min"),
    ell: int = typer.Option(..., "--ell", help="Number of non-empty weight classes"),
    k: int = typer.Option(..., "--k", help="Number of clusters"),
    explicit: bool = typer.Option(False, "--explicit", help="Print the fully explicit bound"),
    as_json: bool = typer.Option(False, "--json", help="Print every constant as JSON"),
) -> None:
    """
    Evaluate the approximation bound for given instance parameters.
    """
    with _handle_errors("bound"):
        report = bound_report(alpha, g, sigma_ratio, ell, k)
        if as_json:
            typer.echo(report.model_dump_json(indent=2))
            return
        value = report.explicit_bound if explicit else report.bound_value
        typer.echo(f"{value:.12g}")


@app.command("families")
def families_command() -> None:
    """
    Show available instance families and presets.
    """
    console.print(Panel.fit("[bold]Instance Families[/bold]", border_style="cyan"))
    table = Table(show_header=True, header_style="bold cyan")
    table.add_column("Family")
    table.add_column("Description")
    for family, description in get_available_families().items():
        table.add_row(family, description)
    console.print(table)
    console.print(
        f"\nPresets: {', '.join(p.value for p in InstancePreset)}"
        "\nUsage: [cyan]dalpha-seeding generate --preset D1 --out d1.csv[/cyan]"
    )


if __name__ == "__main__":
    app()
