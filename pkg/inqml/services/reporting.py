"""Output for the CLI: JSON for scripts, rich tables on a terminal."""

from __future__ import annotations

import logging
from typing import Any, NoReturn

import typer
from rich.console import Console
from rich.table import Table

from inqml.models.schemas import FuzzReport
from inqml.services.io import dumps

log = logging.getLogger("reporting")

console = Console()
err_console = Console(stderr=True)


def wants_json(flag: bool) -> bool:
    return flag or not console.is_terminal


def emit_json(payload: Any) -> None:
    typer.echo(dumps(payload).decode(), nl=False)


def abort(message: str) -> NoReturn:
    """One red line on stderr, exit status 1."""
    log.error(message)
    err_console.print(f"[bold red]error:[/bold red] {message}", highlight=False)
    raise typer.Exit(code=1)


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "[green]yes[/green]" if value else "[red]no[/red]"
    if value is None:
        return "-"
    if isinstance(value, (list, tuple)):
        return ", ".join(str(v) for v in value) or "∅"
    return str(value)


def show(payload: dict[str, Any], *, title: str, as_json: bool, headline: str | None = None) -> None:
    """JSON, or a two-column table with an optional headline above it."""
    if wants_json(as_json):
        emit_json(payload)
        return
    if headline:
        console.print(headline, highlight=False)
    table = Table(title=title, show_header=False)
    table.add_column("field", style="bold")
    table.add_column("value")
    for key, value in payload.items():
        if isinstance(value, dict) or (isinstance(value, list) and value and isinstance(value[0], dict)):
            continue
        table.add_row(key, _cell(value))
    console.print(table)


def show_lines(lines: list[str], *, title: str) -> None:
    console.rule(title)
    for line in lines:
        console.print(line, highlight=False, markup=False)


def fuzz_payload(report: FuzzReport) -> dict[str, Any]:
    payload = report.model_dump(mode="json", exclude_none=True)
    payload.update(trials=report.trials, failures=report.failures, summary=report.headline())
    return payload


def show_fuzz_report(report: FuzzReport, *, as_json: bool) -> None:
    if wants_json(as_json):
        emit_json(fuzz_payload(report))
        return
    table = Table(title=f"fuzz (seed {report.config.seed})")
    table.add_column("check", style="bold")
    table.add_column("trials", justify="right")
    table.add_column("failures", justify="right")
    table.add_column("notes")
    for check, summary in report.checks.items():
        failures = f"[red]{summary.failures}[/red]" if summary.failures else "0"
        notes = ", ".join(f"{k}={v}" for k, v in sorted(summary.notes.items()))
        table.add_row(check, str(summary.trials), failures, notes)
    console.print(table)
    for bundle in report.bundles:
        console.print(
            f"  ✗ {bundle.check} trial {bundle.trial}: |W|={len(bundle.model.worlds)} "
            f"formula={bundle.formula or '-'} after {bundle.shrink_steps} shrink steps",
            highlight=False,
            markup=False,
        )
    style = "red" if report.failures else "green"
    console.print(f"[{style}]{report.headline()}[/{style}]")
