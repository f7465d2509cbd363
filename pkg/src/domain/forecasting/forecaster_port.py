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
from typing import Any

import numpy as np

from src.domain.features.feature_data_objects import FeatureMatrix


class ForecasterPort(ABC):
    """
    This interface lets the backtest drive any forecasting model the same way:
    fit on a set of matrix rows, then predict the target of other rows.
    """

    @property
    @abstractmethod
    def label(self) -> str:
        """
        Returns:
            str: Model label used in forecast records and reports.
        """
        pass

    @abstractmethod
    def fit(self, matrix: FeatureMatrix, rows: np.ndarray) -> Any:
        """
        Fit a model using only the given rows.

        Args:
            matrix (FeatureMatrix): Feature matrix holding the target.
            rows (np.ndarray): Fit rows, in increasing order.

        Returns:
            Any: The fitted, immutable model.
        """
        pass

    @abstractmethod
    def predict(self, model: Any, matrix: FeatureMatrix, rows: np.ndarray) -> np.ndarray:
        """
        Args:
            model (Any): A model returned by fit().
            matrix (FeatureMatrix): Feature matrix with the fit-time columns.
            rows (np.ndarray): Rows whose next-day target is forecast.

        Returns:
            np.ndarray: One prediction per row, in target units.
        """
        pass
