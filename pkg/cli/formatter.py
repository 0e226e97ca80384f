"""Rich terminal output formatting."""

from datetime import datetime
from typing import Optional

from rich.console import Console
from rich.table import Table
from rich.text import Text

from core.lfun import Scenario
from core.report import VerificationReport


console = Console()

STATUS_STYLE = {"pass": "green", "fail": "red"}


def format_timestamp(ts: Optional[str]) -> str:
    """Format an ISO timestamp for display."""
    if not ts:
        return "N/A"
    try:
        dt = datetime.fromisoformat(ts.replace('Z', '+00:00'))
        return dt.strftime("%Y-%m-%d %H:%M")
    except (ValueError, AttributeError):
        return ts[:16] if len(ts) > 16 else ts


def truncate(text: str, max_len: int = 80) -> str:
    """Truncate text to max length with ellipsis."""
    if not text:
        return ""
    text = text.replace('\n', ' ').strip()
    if len(text) <= max_len:
        return text
    return text[:max_len - 3] + "..."


def format_complex(value: Optional[complex], digits: int = 10) -> str:
    """Compact complex display; the imaginary part only when it matters."""
    if value is None:
        return "-"
    value = complex(value)
    if value.imag == 0 or abs(value.imag) < 1e-14 * max(1.0, abs(value.real)):
        return f"{value.real:.{digits}g}"
    return f"{value.real:.{digits}g}{value.imag:+.3g}i"


def status_text(report: VerificationReport) -> Text:
    status = report.status
    return Text(status, style=STATUS_STYLE.get(status, "yellow"))


def format_reports_table(reports: list[VerificationReport], title: Optional[str] = None) -> None:
    """Print one row per report."""
    if not reports:
        console.print("[yellow]No reports[/yellow]")
        return

    table = Table(show_header=True, header_style="bold", title=title)
    table.add_column("ID", style="cyan", no_wrap=True)
    table.add_column("Identity")
    table.add_column("Scenario", style="blue")
    table.add_column("u, v, k, x", style="dim")
    table.add_column("LHS", justify="right")
    table.add_column("Rel. residual", justify="right")
    table.add_column("Tol", justify="right", style="dim")
    table.add_column("Status")
    table.add_column("Time", justify="right", style="dim")

    for r in reports:
        p = r.parameters
        params = f"{format_complex(p.get('u'), 4)}, {format_complex(p.get('v'), 4)}, {p.get('k')}, {p.get('x')}"
        table.add_row(
            r.id[:8],
            r.identity,
            r.scenario,
            params,
            format_complex(r.lhs),
            f"{r.rel_residual:.2e}" if r.rel_residual is not None else "-",
            f"{r.tolerance:.0e}",
            status_text(r),
            f"{r.wall_time:.1f}s",
        )

    console.print(table)
    passed = sum(r.passed for r in reports)
    console.print(f"\n[dim]{passed}/{len(reports)} passed[/dim]")


def format_report_detail(report: VerificationReport) -> None:
    """Print a single report with its term breakdown and settings."""
    console.print(f"\n[bold cyan]{report.identity}[/bold cyan] on [blue]{report.scenario}[/blue]  ", end="")
    console.print(status_text(report))
    console.print(f"[dim]ID:[/dim] {report.id}")
    console.print(f"[dim]Date:[/dim] {format_timestamp(report.created_at)}")
    p = report.parameters
    console.print(f"[dim]Parameters:[/dim] u={format_complex(p.get('u'))} v={format_complex(p.get('v'))} "
                  f"k={p.get('k')} gamma={p.get('gamma')} x={p.get('x')}")
    console.print(f"[dim]LHS:[/dim] {format_complex(report.lhs, 15)}")
    console.print(f"[dim]RHS:[/dim] {format_complex(report.rhs, 15)}")
    if report.rel_residual is not None:
        console.print(f"[dim]Residual:[/dim] abs {report.abs_residual:.3e}, rel {report.rel_residual:.3e} "
                      f"(tol {report.tolerance:.1e})")
    if report.error:
        console.print(f"[red]Error:[/red] {report.error}")

    if report.terms:
        table = Table(show_header=True, header_style="bold", title="Terms")
        table.add_column("Term", style="cyan")
        table.add_column("Value", justify="right")
        for name, value in report.terms.items():
            shown = format_complex(value, 15) if isinstance(value, complex) else f"{value:.6e}"
            table.add_row(name, shown)
        console.print(table)

    if report.settings:
        settings = ", ".join(f"{k}={v}" for k, v in sorted(report.settings.items()))
        console.print(f"[dim]Settings:[/dim] {truncate(settings, 200)}")
    console.print(f"[dim]Wall time:[/dim] {report.wall_time:.2f}s")


def format_saved_reports(reports: list[VerificationReport]) -> None:
    """Print the saved-report listing."""
    if not reports:
        console.print("[yellow]No saved reports found.[/yellow]")
        return

    table = Table(show_header=True, header_style="bold")
    table.add_column("ID", style="cyan")
    table.add_column("Identity")
    table.add_column("Scenario", style="blue")
    table.add_column("Status")
    table.add_column("Date", style="dim")

    for r in reports:
        table.add_row(r.id[:8], r.identity, r.scenario, status_text(r), format_timestamp(r.created_at))

    console.print(table)


def format_scenarios_table(scenarios: list[Scenario]) -> None:
    """Print the built-in scenarios with their documented parameter sets."""
    table = Table(show_header=True, header_style="bold")
    table.add_column("Scenario", style="cyan", no_wrap=True)
    table.add_column("delta", justify="right")
    table.add_column("sigma_a", justify="right")
    table.add_column("Poles", style="dim")
    table.add_column("Sums (u, v, k, gamma)")
    table.add_column("Derivatives (k, gamma, h)")
    table.add_column("Description", style="dim")

    for s in scenarios:
        poles = ", ".join(f"{p.location:g}: {p.residue:.4g}" for p in s.phi.active_poles()) or "none"
        sums, der = s.sums, s.derivatives
        table.add_row(
            s.name,
            f"{s.delta:g}",
            f"{s.sigma_a:g}",
            poles,
            f"{format_complex(sums.u, 4)}, {format_complex(sums.v, 4)}, {sums.k}, {sums.gamma:g}",
            f"{der.k}, {der.gamma:g}, {der.h:g}",
            s.description,
        )

    console.print(table)
    console.print("\n[dim]sigma_<l> is available for every odd l[/dim]")


def format_selftest(results: list[tuple[str, bool, str]]) -> None:
    """Print selftest check outcomes."""
    table = Table(show_header=True, header_style="bold")
    table.add_column("Check", style="cyan")
    table.add_column("Result")
    table.add_column("Detail", style="dim")
    for name, ok, detail in results:
        table.add_row(name, Text("ok" if ok else "FAILED", style="green" if ok else "red"), detail)
    console.print(table)
