from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Optional

import inflect
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from rovtrack.extra_types import Pluralizer

if TYPE_CHECKING:
    from rovtrack.controller import Gains
    from rovtrack.metrics import Metrics
    from rovtrack.workbench import Comparison

logger = logging.getLogger(__name__)

DOF_NAMES = ["X", "Y", "Z", "phi", "theta", "psi"]


def _format_vector(values: Optional[list[float]]) -> list[str]:
    if values is None:
        return ["-"] * 6
    return [f"{value:.4g}" for value in values]


@dataclass(kw_only=True)
class Printer:
    console: Console = field(default_factory=Console)
    pluralizer: Pluralizer = field(default_factory=inflect.engine)

    def print_message(self, msg: str) -> None:
        self.console.print(f"[reset][bold]{msg}")

    def print_success(self, msg: str) -> None:
        self.console.print(f"[bold green]{msg}")

    def print_warning(self, msg: str) -> None:
        self.console.print(f"[bold bright_yellow]{msg}")

    def print_error(self, msg: str) -> None:
        self.console.print(f"[bold red]{msg}")

    def print_written(self, filepaths: list[Path]) -> None:
        n_files = len(filepaths)
        self.print_success(f"Wrote {n_files} {self.pluralizer.plural_noun('file', n_files)}")
        for filepath in filepaths:
            self.print_message(f"[bright_black]  {filepath}")

    def print_metrics(self, metrics: Metrics, title: str = "Metrics") -> None:
        table = Table(border_style="bright_black", header_style="steel_blue3")
        table.add_column("", style="steel_blue3")
        for name in DOF_NAMES:
            table.add_column(name, justify="right", style="steel_blue1")
        table.add_row("RMS error", *_format_vector(metrics.rms_error))
        table.add_row(f"Final {metrics.window:g} s error", *_format_vector(metrics.final_error))
        table.add_row("Estimate error", *_format_vector(metrics.estimation_error))
        table.add_row("Mean estimate", *_format_vector(metrics.mean_estimate))

        summary = Table(show_header=False, border_style="bright_black")
        summary.add_column("", style="steel_blue3")
        summary.add_column("", style="steel_blue1")
        summary.add_row("Final XY error", f"{metrics.final_xy_error:.4g} m")
        summary.add_row("Peak Z error", f"{metrics.z_amplitude:.4g} m")
        summary.add_row("Peak pitch error", f"{metrics.theta_amplitude:.4g} rad")
        summary.add_row("Vc rises", str(metrics.vc_violations))
        summary.add_row("Cost", f"{metrics.cost:.6g}")

        self.console.print(Panel(table, title=title, border_style="bright_black"))
        self.console.print(summary)

    def print_comparison(self, comparison: Comparison) -> None:
        table = Table(border_style="bright_black", header_style="steel_blue3")
        table.add_column("Mode", style="steel_blue3")
        table.add_column("Status")
        table.add_column("Final XY error", justify="right", style="steel_blue1")
        for name in DOF_NAMES:
            table.add_column(f"Est. {name}", justify="right", style="steel_blue1")
        for result in comparison.modes:
            status = "[green]ok" if result.status == "ok" else "[red]failed"
            xy = "-" if result.final_xy_error is None else f"{result.final_xy_error:.4g}"
            table.add_row(str(result.mode), status, xy, *_format_vector(result.estimation_error))
        n_modes = len(comparison.modes)
        title = f"{n_modes} controller {self.pluralizer.plural_noun('mode', n_modes)}"
        self.console.print(Panel(table, title=title, border_style="bright_black"))

        if comparison.baseline_xy_ratio is not None:
            self.print_message(f"Baseline / fuzzy final XY error: {comparison.baseline_xy_ratio:.3g}")
        if comparison.fuzzy_rotational_not_worse is not None:
            verdict = "not worse" if comparison.fuzzy_rotational_not_worse else "worse"
            self.print_message(f"Fuzzy rotational estimation error is {verdict} than constant")
        for result in comparison.modes:
            if result.note is not None:
                self.print_warning(f"{result.mode}: {result.note}")

    def print_gains(self, gains: Gains, cost: float, reference_cost: float) -> None:
        table = Table(border_style="bright_black", header_style="steel_blue3")
        table.add_column("", style="steel_blue3")
        for name in DOF_NAMES:
            table.add_column(name, justify="right", style="steel_blue1")
        table.add_row("k1", *_format_vector(gains.k1))
        table.add_row("k2", *_format_vector(gains.k2))
        self.console.print(Panel(table, title="Tuned gains", border_style="bright_black"))
        self.print_message(f"Best cost {cost:.6g} (published gains: {reference_cost:.6g})")
