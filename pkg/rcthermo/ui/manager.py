#!/usr/bin/env python3
from __future__ import annotations

from typing import Iterable, List, Mapping, Optional, Sequence

from rich.console import Console
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TaskProgressColumn,
    TextColumn,
    TimeElapsedColumn,
)
from rich.table import Table

from .theme import PanelTheme


def _num(value: Optional[float], digits: int = 6) -> str:
    if value is None:
        return "-"
    return f"{value:.{digits}g}"


class UIManager:
    def __init__(self, console: Console) -> None:
        self.console = console

    def show_catalog(self, families: Iterable) -> None:
        table = Table(title="Spectral density catalog", show_header=True, header_style="bold cyan")
        table.add_column("Family", style="cyan", no_wrap=True)
        table.add_column("Statistics", style="yellow")
        table.add_column("Parameters")
        table.add_column("Cutoff", no_wrap=True)
        table.add_column("Description", style="white")
        for family in families:
            table.add_row(
                family.name,
                family.statistics.value,
                ", ".join(family.parameters),
                "rigid" if family.rigid else "soft",
                family.description,
            )
        self.console.print(table)

    def show_map_result(self, result: Mapping[str, object], verification: Optional[Mapping[str, object]] = None) -> None:
        table = Table(show_header=False, box=None, padding=(0, 1))
        table.add_row("Mapping", str(result.get("mapping")))
        table.add_row("lambda", _num(result.get("lambda"), 12))
        table.add_row("lambda^2", _num(result.get("lambda_sq"), 12))
        table.add_row("RC energy", _num(result.get("rc_energy"), 12))
        flat = result.get("residual_flat_value")
        if flat is not None:
            table.add_row("Flat residual", _num(flat, 12))
        if result.get("principal_value"):
            table.add_row("First moment", "[dim]principal value[/dim]")
        if verification is not None:
            label = "pass" if verification.get("passed") else "fail"
            table.add_row("Catalog check", PanelTheme.status(label))
        self.console.print(PanelTheme.build(table, title="Reaction coordinate", style="info", fit=True))

    def show_chain(self, sites: Sequence[float], hops: Sequence[float], deviation: Optional[float]) -> None:
        table = Table(title="Chain coefficients", show_header=True, header_style="bold cyan")
        table.add_column("Step", justify="right", style="dim")
        table.add_column("lambda", justify="right")
        table.add_column("Energy", justify="right")
        for step, (hop, site) in enumerate(zip(hops, sites)):
            table.add_row(str(step), _num(hop, 10), _num(site, 10))
        self.console.print(table)
        if deviation is not None:
            self.console.print(f"[dim]distance to fixed point: {deviation:.3e}[/dim]")

    def show_cycle(self, report: Mapping[str, object]) -> None:
        ledger = Table(title=f"Otto cycle ({report.get('variant')})", show_header=True, header_style="bold cyan")
        ledger.add_column("Entry", style="cyan")
        ledger.add_column("Energy change", justify="right")
        for name, value in dict(report.get("ledger", {})).items():
            ledger.add_row(name, _num(value, 10))
        ledger.add_row("[bold]W_net[/bold]", _num(report.get("W_net"), 10))
        ledger.add_row("[bold]Q_hot[/bold]", _num(report.get("Q_hot"), 10))
        ledger.add_row("[bold]eta[/bold]", _num(report.get("eta"), 10))
        self.console.print(ledger)

    def show_grid_summary(self, solver: str, counts: Mapping[str, int], failures: int) -> None:
        table = Table(show_header=False, box=None, padding=(0, 1))
        for mode, count in counts.items():
            table.add_row(PanelTheme.status(mode), str(count))
        if failures:
            table.add_row(PanelTheme.status("fail"), str(failures))
        self.console.print(PanelTheme.build(table, title=f"Operating map ({solver})", style="info", fit=True))

    def show_comparison(self, comparison: Mapping[str, object]) -> None:
        style = "success" if comparison.get("boundaries_agree") else "warning"
        lines = [
            f"max current error: {_num(comparison.get('max_current_error'))}",
            f"mode mismatches: {comparison.get('mode_mismatches')} of {comparison.get('cells')}",
            f"boundary shift: {_num(comparison.get('boundary_shift_cells'))} cells",
        ]
        self.console.print(PanelTheme.build("\n".join(lines), title="Exact vs RC", style=style, fit=True))

    def show_checks(self, checks: List[Mapping[str, object]]) -> None:
        table = Table(title="Self test", show_header=True, header_style="bold cyan")
        table.add_column("Check", style="cyan")
        table.add_column("Result", no_wrap=True)
        table.add_column("Detail", style="white")
        for check in checks:
            table.add_row(str(check["name"]), PanelTheme.status("pass" if check["passed"] else "fail"), str(check.get("detail", "")))
        self.console.print(table)

    def show_written(self, paths: Iterable) -> None:
        paths = [str(p) for p in paths]
        if paths:
            self.console.print(PanelTheme.build("\n".join(paths), title="Outputs", style="success", fit=True))

    def display_error(self, command: str, message: str) -> None:
        self.console.print(PanelTheme.build(f"[red]{message}[/red]", title=f"{command} failed", style="error"))

    @staticmethod
    def create_progress_bar(console: Optional[Console] = None) -> Progress:
        return Progress(
            SpinnerColumn("point"),
            TextColumn("[bold blue]{task.description}"),
            BarColumn(bar_width=None),
            TaskProgressColumn(),
            MofNCompleteColumn(),
            TextColumn("•"),
            TimeElapsedColumn(),
            console=console,
            transient=False,
        )
