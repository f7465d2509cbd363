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
from typing import Tuple

from src.domain.market.market_data_objects import CleaningReport, IntradayPriceSeries, ValidationSummary


class PriceSourcePort(ABC):
    """
    This port gives the pipeline access to half-hourly price panels, raw or
    already cleaned.
    """

    @abstractmethod
    def read_series(self, path: Path) -> Tuple[IntradayPriceSeries, ValidationSummary]:
        """
        Args:
            path (Path): Location of the raw price table.

        Returns:
            Tuple[IntradayPriceSeries, ValidationSummary]: The ingested, still
            uncleaned, series and what ingestion noticed on the way.
        """
        pass

    @abstractmethod
    def write_cleaned(self, series: IntradayPriceSeries, report: CleaningReport, path: Path) -> None:
        """
        Persist a cleaned series with a per-cell interpolation flag.
        """
        pass

    @abstractmethod
    def read_cleaned(self, path: Path) -> IntradayPriceSeries:
        pass
