"""CLI commands for hecke-product."""

import logging
import sys
from pathlib import Path
from typing import Optional

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import Progress, SpinnerColumn, TextColumn

from core import persistence
from core.config import RunConfig, env_log_level, load_config, parse_complex
from core.errors import ConfigError, HeckeError, HypothesisError
from core.gseries import check_identity_hypotheses, verify_identity
from core.lfun import list_scenarios
from core.report import VerificationReport, csv_row, to_csv, to_json, to_text
from . import formatter


console = Console()
logger = logging.getLogger("hecke_product")

EXIT_OK = 0
EXIT_IDENTITY_FAILED = 1
EXIT_CONFIG = 2
EXIT_CERTIFICATION = 3


def _setup_logging(verbose: int) -> None:
    level = {0: env_log_level(), 1: "INFO"}.get(verbose, "DEBUG")
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


@click.group()
@click.option("--verbose", "-v", count=True, help="-v for INFO, -vv for DEBUG logging")
@click.version_option(package_name="hecke-product")
def cli(verbose):
    """Numerical verification of Hecke-type product formulas for Dirichlet series."""
    _setup_logging(verbose)


def _build_config(config_path, overrides: dict, tol_overrides) -> RunConfig:
    config = load_config(config_path) if config_path else RunConfig()
    config = config.with_overrides(**overrides)
    for item in tol_overrides or ():
        config = config.with_tol_override(item)
    return config


def _fail(e: Exception, code: int) -> None:
    console.print(f"[red]Error:[/red] {e}")
    sys.exit(code)


def exit_code_for(reports: list[VerificationReport]) -> int:
    """3 if any sub-evaluation failed to certify, 1 if any identity failed, else 0."""
    if any(r.error for r in reports):
        return EXIT_CERTIFICATION
    if not all(r.passed for r in reports):
        return EXIT_IDENTITY_FAILED
    return EXIT_OK


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        click.echo(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    console.print(f"[dim]Report written:[/dim] {out}")


def _write_reports(reports: list[VerificationReport], config: RunConfig) -> None:
    out = config.output_path
    fmt = config.output_format
    if fmt == "json":
        _emit(to_json(reports), out)
    elif fmt == "csv":
        _emit(to_csv([csv_row(r) for r in reports]), out)
    else:
        if out is not None:
            _emit(to_text(reports), out)
            # machine-readable twin next to the text report
            _emit(to_json(reports), out.with_suffix(".json"))
        formatter.format_reports_table(reports)
        for r in reports:
            if not r.passed:
                formatter.format_report_detail(r)


_run_options = [
    click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                 help="YAML run-config file"),
    click.option("--scenario", "-s", help="tau, zeta or sigma_<odd l>"),
    click.option("--l", "l", type=int, help="l for the sigma_l scenario"),
    click.option("--identity", "-i", help="id1, id2, id3, equality1, expresion1, expression2, s2 or all"),
    click.option("--out", "output_path", type=click.Path(dir_okay=False), help="Write the report here"),
    click.option("--format", "output_format", type=click.Choice(["json", "text", "csv"]),
                 help="Report format"),
    click.option("--threads", "-t", type=int, help="Worker threads (default HECKE_THREADS)"),
    click.option("--tol-override", "tol_overrides", multiple=True, metavar="KEY=VAL",
                 help="Override one tolerance or truncation setting"),
]


def run_options(fn):
    for option in reversed(_run_options):
        fn = option(fn)
    return fn


@cli.command()
@run_options
@click.option("--u", "u", help="u as 1.2 or 1.2+0.5i")
@click.option("--v", "v", help="v as 1.3 or 1.3-0.5i")
@click.option("--k", "k", type=int, help="Riesz order k")
@click.option("--x", "x", type=float, help="x > 0 (derivative identities always use x = 1)")
@click.option("--gamma", "gamma", type=float, help="Abscissa gamma of the contour shift")
@click.option("--right", "right", type=float, help="Perron abscissa (right side of the contour)")
@click.option("--save/--no-save", default=False, help="Store reports under HECKE_REPORTS_DIR")
def check(config_path, scenario, l, identity, output_path, output_format, threads, tol_overrides,
          u, v, k, x, gamma, right, save):
    """Verify identities of the product formula on one scenario.

    Unset parameters take the scenario's documented defaults.

    Examples:
        hecke-product check --scenario zeta --identity id2
        hecke-product check -s tau -i s2 --x 1.3
        hecke-product check -s sigma_3 -i all --format json --out run.json
        hecke-product check --config run.yaml --tol-override id2=1e-6
    """
    try:
        config = _build_config(config_path, dict(
            scenario=scenario, l=l, identity=identity, output_path=output_path,
            output_format=output_format, threads=threads, u=u, v=v, k=k, x=x,
            gamma=gamma, right=right,
        ), tol_overrides)
        sc = config.get_scenario()
        settings = config.settings()
        jobs = []
        for which in config.identities():
            for point in config.points(sc, which):
                check_identity_hypotheses(which, sc, point)
                jobs.append((which, point))
        logger.info("Hypothesis gates passed for %d checks", len(jobs))
    except (ConfigError, HypothesisError) as e:
        _fail(e, EXIT_CONFIG)

    reports = []
    with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"),
                  console=console, transient=True) as progress:
        task = progress.add_task("Verifying...", total=len(jobs))
        for which, point in jobs:
            progress.update(task, description=f"{which.value} on {sc.name} (x = {point.x:g})")
            reports.append(verify_identity(which, sc, point, settings))
            progress.advance(task)

    _write_reports(reports, config)
    if save:
        for r in reports:
            persistence.save_report(r)
        console.print(f"[dim]Saved {len(reports)} reports[/dim]")
    sys.exit(exit_code_for(reports))


@cli.command()
@run_options
@click.option("--grid", "grid_items", multiple=True, metavar="KEY=V1,V2,...",
              help="Grid values for u, v, k or x (repeatable)")
def sweep(config_path, scenario, l, identity, output_path, output_format, threads, tol_overrides,
          grid_items):
    """Run identities over a parameter grid and write a CSV of residuals.

    Points violating a hypothesis are marked "skipped: hypothesis"; failed
    evaluations are marked and the sweep continues.

    Examples:
        hecke-product sweep -s zeta -i id2 --grid u=2.2,2.4,2.6 --grid v=2.3,2.5,2.7
        hecke-product sweep --config grid.yaml --out residuals.csv
    """
    try:
        config = _build_config(config_path, dict(
            scenario=scenario, l=l, identity=identity, output_path=output_path, threads=threads,
        ), tol_overrides)
        grid = dict(config.grid)
        for item in grid_items:
            if "=" not in item:
                raise ConfigError(f"grid entries look like KEY=V1,V2; got {item!r}")
            key, raw = item.split("=", 1)
            values = [s for s in raw.split(",") if s.strip()]
            grid[key.strip()] = values
        grid = {key: [_grid_value(key, v) for v in values] for key, values in grid.items()}
        config = config.with_overrides(grid=grid)
        runs = config.grid_runs()
        sc = config.get_scenario()
        settings = config.settings()
    except (ConfigError, HypothesisError) as e:
        _fail(e, EXIT_CONFIG)

    rows = []
    reports = []
    with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"),
                  console=console, transient=True) as progress:
        task = progress.add_task("Sweeping...", total=len(runs) * len(config.identities()))
        for run in runs:
            for which in config.identities():
                for point in config.points(sc, which, **run):
                    try:
                        check_identity_hypotheses(which, sc, point)
                    except HypothesisError as e:
                        logger.info("skipping %s at %s: %s", which.value, run, e)
                        rows.append(csv_row(None, which.value, sc.name, point.echo(),
                                            status="skipped: hypothesis"))
                        continue
                    report = verify_identity(which, sc, point, settings)
                    reports.append(report)
                    rows.append(csv_row(report))
                progress.advance(task)

    _emit(to_csv(rows), config.output_path)
    sys.exit(exit_code_for(reports) if reports else EXIT_OK)


def _grid_value(key: str, raw):
    if key in ("u", "v"):
        return parse_complex(raw)
    try:
        return int(raw) if key == "k" else float(raw)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"grid value for {key} must be numeric, got {raw!r}") from e


@cli.command("list-scenarios")
def list_scenarios_cmd():
    """List built-in scenarios and their documented parameter sets.

    Examples:
        hecke-product list-scenarios
    """
    formatter.format_scenarios_table(list_scenarios())


@cli.command()
@click.option("--quick", is_flag=True, help="Skip the contour identity check")
def selftest(quick):
    """Run fast internal consistency checks.

    Examples:
        hecke-product selftest
        hecke-product selftest --quick
    """
    results = run_selftest(quick)
    formatter.format_selftest(results)
    sys.exit(EXIT_OK if all(ok for _, ok, _ in results) else EXIT_IDENTITY_FAILED)


def run_selftest(quick: bool = False) -> list[tuple[str, bool, str]]:
    """(name, ok, detail) for each internal check."""
    from core.arith import ramanujan_tau_table
    from core.lfun import functional_equation_residual, get_scenario
    from core.special import MeijerParams, meijer_contour, meijer_g_1f2

    results = []

    def record(name, fn):
        try:
            ok, detail = fn()
        except HeckeError as e:
            ok, detail = False, f"{type(e).__name__}: {e}"
        results.append((name, ok, detail))

    def tau_values():
        expected = [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]
        got = ramanujan_tau_table(10).values
        return list(got) == expected, "tau(1..10)"

    def meijer_routes():
        p = MeijerParams.for_series(0.5, 2.2, 3, 0.1)
        a, b = meijer_g_1f2(p), meijer_contour(p).value
        rel = abs(a - b) / abs(a)
        return rel < 1e-8, f"rel diff {rel:.2e}"

    def functional_equation():
        zeta = get_scenario("zeta")
        worst = max(functional_equation_residual(zeta.phi, complex(0.25, t)) for t in (0.0, 3.0, 10.0))
        return worst < 1e-8, f"max residual {worst:.2e}"

    def residue_identity():
        report = verify_identity("s2", get_scenario("zeta"))
        detail = report.error or f"rel residual {report.rel_residual:.2e}"
        return report.passed, detail

    record("tau coefficients", tau_values)
    record("Meijer series vs contour", meijer_routes)
    record("functional equation (zeta)", functional_equation)
    if not quick:
        record("residue identity (zeta)", residue_identity)
    return results


@cli.group()
def reports():
    """Manage saved verification reports."""


@reports.command("list")
@click.option("--scenario", "-s", help="Only reports for this scenario")
@click.option("--limit", "-n", default=50, help="Maximum reports to show")
def reports_list(scenario, limit):
    """List saved reports, newest first.

    Examples:
        hecke-product reports list
        hecke-product reports list -s zeta
    """
    formatter.format_saved_reports(persistence.list_reports(limit=limit, scenario=scenario))


@reports.command("show")
@click.argument("report_id")
@click.option("--format", "output_format", type=click.Choice(["json", "text", "rich"]), default="rich")
def reports_show(report_id, output_format):
    """Show a saved report by ID (prefix match).

    Examples:
        hecke-product reports show 3fa2c1
    """
    report = persistence.load_report(report_id)
    if not report:
        console.print(f"[red]Report not found:[/red] {report_id}")
        sys.exit(1)
    if output_format == "json":
        click.echo(to_json([report]))
    elif output_format == "text":
        click.echo(to_text([report]))
    else:
        formatter.format_report_detail(report)


@reports.command("delete")
@click.argument("report_id")
def reports_delete(report_id):
    """Delete a saved report by ID (prefix match).

    Examples:
        hecke-product reports delete 3fa2c1
    """
    if persistence.delete_report(report_id):
        console.print(f"[green]Deleted:[/green] {report_id}")
    else:
        console.print(f"[red]Report not found:[/red] {report_id}")
        sys.exit(1)


if __name__ == "__main__":
    cli()
