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

import logging
from datetime import timedelta
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.domain.errors import DataError, ModelFitError
from src.domain.evaluation.evaluation_data_objects import BacktestScheme, ForecastRecord
from src.domain.features.feature_data_objects import FeatureMatrix
from src.domain.forecasting.forecaster_port import ForecasterPort

logger = logging.getLogger(__name__)


def target_days(matrix: FeatureMatrix) -> Tuple:
    """
    Day whose value each row forecasts: the next row's day, None for the last row.
    """
    return tuple(matrix.days[1:]) + (None,)


def backtest_rows(matrix: FeatureMatrix, scheme: BacktestScheme) -> Tuple[np.ndarray, np.ndarray]:
    """
    Returns:
            Tuple[np.ndarray, np.ndarray]: Initial fit rows (target day up to train_end) and
            test rows (target day inside the test span).
    """
    forecast_days = target_days(matrix)
    test_start = scheme.test_start or scheme.train_end + timedelta(days=1)
    usable = matrix.usable_rows()
    train_rows = np.array([row for row in usable if forecast_days[row] <= scheme.train_end], dtype=int)
    test_rows = np.array(
        [
            row
            for row in usable
            if forecast_days[row] >= test_start and (scheme.test_end is None or forecast_days[row] <= scheme.test_end)
        ],
        dtype=int,
    )
    if len(train_rows) == 0:
        raise DataError(f"No usable row forecasts a day up to {scheme.train_end}")
    if len(test_rows) == 0:
        raise DataError(f"No usable row forecasts a day from {test_start}")
    return train_rows, test_rows


def rolling_backtest(
    forecasters: Sequence[ForecasterPort],
    matrix: FeatureMatrix,
    scheme: BacktestScheme,
    prefitted: Optional[Dict[str, Any]] = None,
) -> Tuple[ForecastRecord, ...]:
    """
    Walk-forward evaluation. Test rows are taken in blocks of
    `refit_cadence` rows (a single block without cadence); before each block
    every model is refit on all usable rows preceding the block, then
    forecasts the block.

    Args:
            forecasters (Sequence[ForecasterPort]): Models to evaluate.
            matrix (FeatureMatrix): Feature matrix with targets.
            scheme (BacktestScheme): Fit and test spans, refit cadence.
            prefitted (Optional[Dict[str, Any]]): Models, by label, already fit on the rows
                preceding the first test block. They serve the first block.

    Returns:
            Tuple[ForecastRecord, ...]: Records grouped by model, by increasing day.
    """
    _, test_rows = backtest_rows(matrix, scheme)
    forecast_days = target_days(matrix)
    usable = matrix.usable_rows()
    prefitted = prefitted or {}

    cadence = scheme.refit_cadence or len(test_rows)
    blocks = [test_rows[start : start + cadence] for start in range(0, len(test_rows), cadence)]

    records: Dict[str, List[ForecastRecord]] = {forecaster.label: [] for forecaster in forecasters}
    for number, block in enumerate(blocks):
        fit_rows = usable[usable < block[0]]
        logger.info(
            "Backtest block %d/%d: fit on %d rows up to %s, forecast %d days",
            number + 1,
            len(blocks),
            len(fit_rows),
            forecast_days[fit_rows[-1]] if len(fit_rows) else None,
            len(block),
        )
        for forecaster in forecasters:
            if number == 0 and forecaster.label in prefitted:
                model = prefitted[forecaster.label]
            else:
                model = forecaster.fit(matrix, fit_rows)
            predictions = np.asarray(forecaster.predict(model, matrix, block), dtype=float)
            if not np.all(np.isfinite(predictions)):
                raise ModelFitError(f"{forecaster.label} produced non-finite forecasts in block {number + 1}")
            records[forecaster.label].extend(
                ForecastRecord(forecast_days[row], forecaster.label, float(prediction), float(matrix.target[row]))
                for row, prediction in zip(block, predictions)
            )
    return tuple(record for label in records for record in records[label])
