"""Rich terminal formatting for CLI output."""

from __future__ import annotations

from rich.console import Console
from rich.markdown import Markdown
from rich.panel import Panel
from rich.table import Table

from fracspline.models import CheckReport, CsvTable

# Reports go to stderr; stdout carries CSV.
console = Console(stderr=True)


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


def _status_cell(report: CheckReport) -> str:
    if report.skipped:
        return "[dim]skip[/dim]"
    return "[green]pass[/green]" if report.passed else "[bold red]fail[/bold red]"


def display_checks(reports: list[CheckReport]) -> None:
    """Display identity checks as a rich table."""
    if not reports:
        console.print("[dim]No checks run.[/dim]")
        return

    table = Table(title="Identity checks", show_header=True, header_style="bold")
    table.add_column("Check", style="cyan")
    table.add_column("alpha", justify="right")
    table.add_column("Residual", justify="right")
    table.add_column("Tolerance", justify="right")
    table.add_column("Status", width=6)
    table.add_column("Note", no_wrap=False)

    for r in reports:
        table.add_row(
            r.name,
            "-" if r.alpha is None else f"{r.alpha:g}",
            "-" if r.skipped else f"{r.residual:.3e}",
            f"{r.tolerance:.1e}",
            _status_cell(r),
            r.note or "",
        )

    console.print(table)


# ---------------------------------------------------------------------------
# Reproduction
# ---------------------------------------------------------------------------


def display_reproduction(markdown_summary: str) -> None:
    """Display a reproduction summary using rich markdown rendering."""
    console.print(Markdown(markdown_summary))


def display_table_preview(table: CsvTable, limit: int = 12) -> None:
    """Show the first rows of a numeric table."""
    preview = Table(show_header=True, header_style="bold")
    for name in table.header:
        preview.add_column(name, justify="right")
    for row in table.rows[:limit]:
        preview.add_row(*(f"{v:.6g}" for v in row))
    if len(table.rows) > limit:
        preview.caption = f"{len(table.rows) - limit} more rows"
    console.print(preview)


# ---------------------------------------------------------------------------
# Figures summary
# ---------------------------------------------------------------------------


def display_figures_summary(out_dir: str, files: list[str]) -> None:
    """Display the files written by ``figures``."""
    parts = [f"[bold green]{len(files)} datasets written[/bold green]\n"]
    parts.append(f"  Directory: {out_dir}")
    for name in files:
        parts.append(f"  - {name}")
    console.print(Panel("\n".join(parts), title="Figure data"))
