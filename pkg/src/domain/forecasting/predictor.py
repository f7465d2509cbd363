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

from datetime import date
from functools import singledispatch
from typing import Dict, Optional

import numpy as np

from src.domain.errors import DataError, SchemaMismatchError
from src.domain.features.feature_data_objects import FeatureMatrix
from src.domain.forecasting.ensemble import predict_ensemble
from src.domain.forecasting.forecasting_data_objects import EnsembleModel, GarchModel, GbtModel, HarModel, LstmModel
from src.domain.forecasting.garch import forecast_variances
from src.domain.forecasting.gbt import predict_gbt
from src.domain.forecasting.har import predict_har
from src.domain.forecasting.lstm import build_windows, predict_lstm

"""
Uniform inference entry point. Every fitted model predicts the target of
the requested matrix rows after its fit-time column names are checked
against the matrix.
"""


def check_schema(feature_names, matrix: FeatureMatrix) -> None:
    missing = tuple(name for name in feature_names if name not in matrix.column_names)
    if missing:
        raise SchemaMismatchError(missing)


@singledispatch
def predict(model, matrix: FeatureMatrix, rows: np.ndarray, daily_returns: Optional[Dict[date, float]] = None):
    raise TypeError(f"No prediction rule for {type(model).__name__}")


@predict.register
def _(model: HarModel, matrix: FeatureMatrix, rows: np.ndarray, daily_returns=None) -> np.ndarray:
    check_schema(model.feature_names, matrix)
    return predict_har(model, matrix, rows)


@predict.register
def _(model: GbtModel, matrix: FeatureMatrix, rows: np.ndarray, daily_returns=None) -> np.ndarray:
    check_schema(model.feature_names, matrix)
    return predict_gbt(model, matrix.values(model.feature_names, rows))


@predict.register
def _(model: LstmModel, matrix: FeatureMatrix, rows: np.ndarray, daily_returns=None) -> np.ndarray:
    check_schema(model.feature_names, matrix)
    windows = build_windows(matrix.values(model.feature_names), rows, model.params.sequence_length)
    return predict_lstm(model, windows)


@predict.register
def _(model: EnsembleModel, matrix: FeatureMatrix, rows: np.ndarray, daily_returns=None) -> np.ndarray:
    check_schema(model.feature_names, matrix)
    return predict_ensemble(model, matrix, rows)


@predict.register
def _(model: GarchModel, matrix: FeatureMatrix, rows: np.ndarray, daily_returns=None) -> np.ndarray:
    """
    One-step-ahead conditional variance for the day after each row, filtered
    through every return up to the row's day. Rows whose day has no return
    get NaN.
    """
    if daily_returns is None:
        raise DataError("GARCH predictions need the daily return series")
    ordered_days = sorted(daily_returns)
    variances = forecast_variances(model, np.array([daily_returns[day] for day in ordered_days]))
    position = {day: index for index, day in enumerate(ordered_days)}
    return np.array(
        [variances[position[matrix.days[row]]] if matrix.days[row] in position else np.nan for row in rows]
    )
