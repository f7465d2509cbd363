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

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Sequence

from src.domain.evaluation.evaluation_data_objects import ForecastRecord, RejectionHeatmap


class PlotterPort(ABC):
    """
    This port renders the report figures.
    """

    @abstractmethod
    def plot_forecasts(self, model: str, records: Sequence[ForecastRecord], path: Path) -> None:
        """
        Predicted against actual values of one model over the test span.
        """
        pass

    @abstractmethod
    def plot_heatmap(self, heatmap: RejectionHeatmap, path: Path) -> None:
        """
        Rejection counts grid, each cell labelled "count/segments".
        """
        pass
