from pathlib import Path
from typing import Optional

import click
from rich.console import Console
from rich.table import Table

from bench import (TABLES, BenchmarkRunner, aggregate as aggregate_results, emit, load_config, load_report,
                   read_raw_results, render_report)
from datagen import FAMILIES, DgpSpec, describe, generate as generate_dataset, write_csv
from utils.errors import PARTIAL_RUN_EXIT_CODE, CateBenchError
from utils.file_utils import FileUtils
from utils.logger import Logger
from utils.numerics import RngStream


def _fail(ctx: click.Context, console: Console, error: CateBenchError):
    console.print(f"[bold red]Error:[/bold red] {str(error)}")
    ctx.exit(error.exit_code)


def _summary_table(rows) -> Table:
    table = Table(title="Generated datasets")
    columns = ["dataset", "n", "d", "treated_fraction", "ate", "tau_variance", "pi_min", "pi_max", "tau_linear_r2"]
    for column in columns:
        table.add_column(column, justify="left" if column == "dataset" else "right")
    for name, summary in rows:
        cells = [name]
        for column in columns[1:]:
            value = summary.get(column)
            cells.append("n/a" if value is None else (str(value) if isinstance(value, int) else f"{value:.4f}"))
        table.add_row(*cells)
    return table


def _records_table(summary) -> Table:
    statuses = sorted({status for counts in summary.values() for status in counts})
    table = Table(title="Run records")
    table.add_column("operation")
    for status in statuses:
        table.add_column(status, justify="right")
    for operation, counts in summary.items():
        table.add_row(operation, *(str(counts.get(status, 0)) for status in statuses))
    return table


def _failures_table(records) -> Table:
    table = Table(title="Latest failures")
    for column in ("operation", "dataset", "seed", "subject", "details"):
        table.add_column(column)
    for record in records:
        table.add_row(record['operation_type'], record['dataset'], str(record['seed']),
                      record['subject'] or "", record['details'] or "")
    return table


@click.group()
def cli():
    """CATE estimator-selection benchmark."""


@cli.command()
@click.option('--family', type=click.Choice(FAMILIES), help='DGP family for a single dataset')
@click.option('--n', 'n_rows', type=int, default=1000, show_default=True, help='Number of rows')
@click.option('--d', type=int, default=5, show_default=True, help='Number of covariates')
@click.option('--seed', type=int, default=0, show_default=True, help='Root seed')
@click.option('--confounding-strength', type=float, default=1.0, show_default=True)
@click.option('--overlap-floor', type=float, default=0.05, show_default=True)
@click.option('--noise-sd', type=float, default=1.0, show_default=True)
@click.option('--effect-scale', type=float, default=1.0, show_default=True)
@click.option('--out', type=click.Path(dir_okay=False), help='Output CSV for a single dataset')
@click.option('--config', 'config_path', type=click.Path(), help='Write every generated dataset of a config')
@click.option('--out-dir', type=click.Path(file_okay=False), help='Output directory with --config')
@click.pass_context
def generate(ctx, family: Optional[str], n_rows: int, d: int, seed: int, confounding_strength: float,
             overlap_floor: float, noise_sd: float, effect_scale: float, out: Optional[str],
             config_path: Optional[str], out_dir: Optional[str]):
    """Write synthetic datasets with counterfactual columns to CSV."""
    console = Console()
    if bool(config_path) == bool(family):
        raise click.UsageError("pass either --family (with --out) or --config (with --out-dir)")
    if family and not out:
        raise click.UsageError("--family needs --out")
    if config_path and not out_dir:
        raise click.UsageError("--config needs --out-dir")

    rows = []
    try:
        if family:
            spec = DgpSpec(family, d, confounding_strength, overlap_floor, noise_sd, effect_scale).validate()
            ds = generate_dataset(spec, n_rows, RngStream(seed, (family,)).child("generate"))
            write_csv(ds, out)
            rows.append((str(out), describe(ds)))
        else:
            config = load_config(config_path)
            target = FileUtils.create_directory(out_dir)
            for ds_cfg in config.datasets:
                if ds_cfg.dgp is None:
                    continue
                for s in config.seeds:
                    ds = generate_dataset(ds_cfg.dgp, ds_cfg.n, RngStream(s, (ds_cfg.id,)).child("generate"))
                    path = write_csv(ds, target / f"{ds_cfg.id}_seed{s}.csv")
                    rows.append((path.name, describe(ds)))
    except CateBenchError as e:
        _fail(ctx, console, e)
        return

    console.print(_summary_table(rows))
    console.print(f"[bold green]Wrote {len(rows)} dataset(s)[/bold green]")


@cli.command()
@click.option('--config', 'config_path', required=True, type=click.Path(), help='Benchmark YAML config')
@click.option('--output-dir', type=click.Path(file_okay=False), help='Override output_dir from the config')
@click.option('--log-dir', type=click.Path(file_okay=False), help='Override log_dir from the config')
@click.option('--quiet', is_flag=True, help='Do not render tables or progress')
@click.pass_context
def run(ctx, config_path: str, output_dir: Optional[str], log_dir: Optional[str], quiet: bool):
    """Run the full benchmark and write raw results and report tables."""
    console = Console()
    try:
        config = load_config(config_path)
        logger = Logger(log_dir or config.log_dir)
        first_record = logger.last_record_id()
        runner = BenchmarkRunner(config, logger, console=None if quiet else console)
        raw = runner.run()
        report = aggregate_results(raw, config.source_hash)
        written = emit(raw, report, output_dir or config.output_dir)
    except CateBenchError as e:
        _fail(ctx, console, e)
        return

    if not quiet:
        render_report(console, report, "normalized_pehe")
        console.print(_records_table(logger.record_summary(after_id=first_record)))
        failures = logger.recent_records(limit=10, status="failure", after_id=first_record)
        if failures:
            console.print(_failures_table(failures))
    console.print(f"[bold green]Benchmark complete![/bold green] {len(raw.frame)} rows, "
                  f"{raw.n_skipped} skipped cell(s), {raw.n_failures} failure(s) -> {written['report'].parent}")
    if raw.n_failures:
        ctx.exit(PARTIAL_RUN_EXIT_CODE)


@cli.command()
@click.option('--raw', 'raw_path', required=True, type=click.Path(dir_okay=False), help='raw_results.csv')
@click.option('--records', 'records_path', type=click.Path(dir_okay=False), help='run_records.csv')
@click.option('--out', 'out_dir', required=True, type=click.Path(file_okay=False), help='Output directory')
@click.option('--config-hash', help='Config hash to carry into report.json')
@click.pass_context
def aggregate(ctx, raw_path: str, records_path: Optional[str], out_dir: str, config_hash: Optional[str]):
    """Rebuild the report tables from a raw results file."""
    console = Console()
    try:
        with console.status("[bold green]Aggregating results..."):
            raw = read_raw_results(raw_path, records_path)
            report = aggregate_results(raw, config_hash)
            written = emit(raw, report, out_dir)
    except CateBenchError as e:
        _fail(ctx, console, e)
        return
    console.print(f"[bold green]Report written to {Path(written['report'])}[/bold green]")


@cli.command()
@click.option('--report', 'report_path', required=True, type=click.Path(dir_okay=False), help='report.json')
@click.option('--table', type=click.Choice(TABLES), help='Render a single table')
@click.pass_context
def report(ctx, report_path: str, table: Optional[str]):
    """Render report tables in the terminal."""
    console = Console()
    try:
        loaded = load_report(report_path)
    except CateBenchError as e:
        _fail(ctx, console, e)
        return
    render_report(console, loaded, table)


if __name__ == '__main__':
    cli()
