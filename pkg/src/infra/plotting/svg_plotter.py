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

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from src.domain.evaluation.evaluation_data_objects import ForecastRecord, RejectionHeatmap  # noqa: E402
from src.domain.pipeline.plotter_port import PlotterPort  # noqa: E402

# Fixed id salt and no date metadata keep identical figures byte-identical
SVG_HASH_SALT = "faep"


class SvgPlotter(PlotterPort):
    """
    Renders the report figures as self-contained SVG files.
    """

    def plot_forecasts(self, model: str, records: Sequence[ForecastRecord], path: Path) -> None:
        days = [record.day for record in records]
        with plt.rc_context({"svg.hashsalt": SVG_HASH_SALT}):
            figure, axes = plt.subplots(figsize=(10, 4))
            axes.plot(days, [record.actual for record in records], color="black", linewidth=1.0, label="actual")
            axes.plot(days, [record.prediction for record in records], color="tab:orange", linewidth=1.0, label=model)
            axes.set_title(f"{model} out-of-sample forecasts")
            axes.set_xlabel("day")
            axes.set_ylabel("target")
            axes.legend(loc="upper right")
            figure.autofmt_xdate()
            self.__save(figure, path)

    def plot_heatmap(self, heatmap: RejectionHeatmap, path: Path) -> None:
        size = len(heatmap.models)
        with plt.rc_context({"svg.hashsalt": SVG_HASH_SALT}):
            figure, axes = plt.subplots(figsize=(1.6 * size + 2, 1.4 * size + 1.5))
            image = axes.imshow(heatmap.counts, cmap="Blues", vmin=0, vmax=max(heatmap.segments, 1))
            axes.set_xticks(range(size), labels=list(heatmap.models), rotation=30, ha="right")
            axes.set_yticks(range(size), labels=list(heatmap.models))
            for i, model_a in enumerate(heatmap.models):
                for j, model_b in enumerate(heatmap.models):
                    label = "-" if i == j else heatmap.cell_label(model_a, model_b)
                    axes.text(j, i, label, ha="center", va="center", fontsize=9)
            axes.set_title(f"DM rejections at {heatmap.significance:g} (row beats column)")
            figure.colorbar(image, ax=axes)
            self.__save(figure, path)

    # PRIVATE METHODS
    @staticmethod
    def __save(figure, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        figure.tight_layout()
        figure.savefig(path, format="svg", metadata={"Date": None})
        plt.close(figure)
