# Faep is a realized-volatility forecasting workbench for half-hourly
# electricity spot prices, from jump decomposition to ensemble backtests.
# Copyright (C) 2025  Pierre Giusti
# 
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
# 
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
# 
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

import math
from typing import Sequence

from rich.table import Table

from src.config import Color
from src.domain.evaluation.evaluation_data_objects import MetricReport, RejectionHeatmap
from src.domain.pipeline.pipeline_data_objects import AblationRow, RunManifest
from src.domain.pipeline.pipeline_runner import FULL_CONFIGURATION
from src.domain.weather.weather_data_objects import WeatherRating
from src.infra.cli.cli_console import CliConsole

"""
CLI rich print module.
Provides high-level functions for formatting the reports of each command.
"""


def rating_color(score: int) -> str:
    """
    Determine the color associated with a weather rating, mild (green) to
    extreme (red).
    """
    match score:
        case 1:
            return Color.GREEN.value
        case 2:
            return Color.BLUE.value
        case 3:
            return Color.YELLOW.value
        case 4:
            return Color.ORANGE.value
        case 5:
            return Color.RED.value
        case _:
            raise ValueError("Rating must be between 1 and 5")


def delta_color(delta: float) -> str:
    if math.isnan(delta) or delta == 0:
        return Color.WHITE.value
    return Color.RED.value if delta > 0 else Color.GREEN.value


def print_success(text: str) -> None:
    check_icon = f"[{Color.GREEN.value} bold]\uf05d[/{Color.GREEN.value} bold]"
    CliConsole.instance().print(f"{check_icon}  [bold]{text}[/bold]", highlight=False)


def print_error(text: str) -> None:
    fail_icon = f"[{Color.RED.value} bold]\uf05c[/{Color.RED.value} bold]"
    CliConsole.error_instance().print(f"{fail_icon}  [bold]{text}[/bold]", highlight=False, markup=True)


def print_manifest(manifest: RunManifest) -> None:
    """
    Display the artifacts of a run with their stage and short digest.
    """
    table = Table(title=f"Run {manifest.config_hash[:12]} (seed {manifest.seed})", title_justify="left")
    table.add_column("stage")
    table.add_column("artifact")
    table.add_column("sha256", style="dim")
    for artifact in manifest.artifacts:
        reused = " (reused)" if artifact.stage in manifest.reused_stages else ""
        table.add_row(f"{artifact.stage}{reused}", artifact.path, artifact.sha256[:12])
    CliConsole.instance().print(table)
    total = sum(manifest.stage_timings.values())
    print_success(f"{len(manifest.artifacts)} artifacts in {total:.2f}s")


def print_ratings(ratings: Sequence[WeatherRating]) -> None:
    table = Table(title="Weather ratings", title_justify="left")
    table.add_column("period")
    table.add_column("rating", justify="right")
    table.add_column("reply")
    for rating in ratings:
        color = rating_color(rating.score)
        cached = " [dim](cached)[/dim]" if rating.cached else ""
        table.add_row(rating.period, f"[{color} bold]{rating.score}[/{color} bold]{cached}", rating.rationale)
    CliConsole.instance().print(table)


def print_metrics(reports: Sequence[MetricReport]) -> None:
    table = Table(title="Out-of-sample accuracy", title_justify="left")
    for column in ("model", "MAE", "MSE", "MAPE", "n"):
        table.add_column(column, justify="left" if column == "model" else "right")
    best_mae = min(report.mae for report in reports) if reports else math.nan
    for report in reports:
        style = f"{Color.GREEN.value} bold" if report.mae == best_mae else ""
        table.add_row(
            report.model, f"{report.mae:.6g}", f"{report.mse:.6g}", f"{report.mape:.6g}", str(report.n), style=style
        )
    CliConsole.instance().print(table)


def print_heatmap(heatmap: RejectionHeatmap) -> None:
    table = Table(
        title=f"DM rejections over {heatmap.segments} segments of {heatmap.segment_size} (row beats column)",
        title_justify="left",
    )
    table.add_column("")
    for model in heatmap.models:
        table.add_column(model, justify="center")
    for model_a in heatmap.models:
        cells = ["-" if model_a == model_b else heatmap.cell_label(model_a, model_b) for model_b in heatmap.models]
        table.add_row(model_a, *cells)
    CliConsole.instance().print(table)


def print_ablation(rows: Sequence[AblationRow]) -> None:
    table = Table(title="Ablation of the ensemble", title_justify="left")
    for column in ("configuration", "MAE", "MSE", "MAPE", "MAE change"):
        table.add_column(column, justify="left" if column == "configuration" else "right")
    for row in rows:
        color = delta_color(row.delta_mae)
        label = row.toggle if row.toggle == FULL_CONFIGURATION else f"w/o {row.toggle}"
        table.add_row(
            label,
            f"{row.mae:.6g}",
            f"{row.mse:.6g}",
            f"{row.mape:.6g}",
            f"[{color}]{row.relative_mae_pct:+.2f}%[/{color}]",
        )
    CliConsole.instance().print(table)
