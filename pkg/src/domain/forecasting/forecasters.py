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
import math
from datetime import date
from typing import Dict, Optional

import numpy as np

from src.config import GARCH_MAX_ITERATIONS, GARCH_MIN_OBSERVATIONS
from src.domain.errors import ModelFitError
from src.domain.features.feature_data_objects import FeatureMatrix, TargetSpec
from src.domain.forecasting.ensemble import fit_ensemble
from src.domain.forecasting.forecaster_port import ForecasterPort
from src.domain.forecasting.forecasting_data_objects import (
    HAR_CJ,
    EnsembleModel,
    EnsembleParams,
    GarchModel,
    HarModel,
)
from src.domain.forecasting.garch import fit_garch
from src.domain.forecasting.har import fit_har
from src.domain.forecasting.predictor import predict

logger = logging.getLogger(__name__)

GARCH_LABEL = "GARCH"
ENSEMBLE_LABEL = "FAEP"
# Share of the fit rows held out to weight the ensemble when no size is given
VALIDATION_SHARE = 0.2


class HarForecaster(ForecasterPort):
    def __init__(self, variant: str = HAR_CJ):
        self.variant = variant

    @property
    def label(self) -> str:
        return self.variant

    def fit(self, matrix: FeatureMatrix, rows: np.ndarray) -> HarModel:
        return fit_har(matrix, self.variant, rows)

    def predict(self, model: HarModel, matrix: FeatureMatrix, rows: np.ndarray) -> np.ndarray:
        return predict(model, matrix, rows)


class GarchForecaster(ForecasterPort):
    """
    GARCH(1,1) baseline on close-to-close returns. A row's forecast is the
    one-step-ahead conditional variance after that row's day, mapped through
    the target transform so it is comparable with the other models.
    """

    def __init__(
        self,
        daily_returns: Dict[date, float],
        target_spec: TargetSpec = TargetSpec(),
        max_iterations: int = GARCH_MAX_ITERATIONS,
        min_observations: int = GARCH_MIN_OBSERVATIONS,
    ):
        self.daily_returns = dict(daily_returns)
        self.target_spec = target_spec
        self.max_iterations = max_iterations
        self.min_observations = min_observations

    @property
    def label(self) -> str:
        return GARCH_LABEL

    def fit(self, matrix: FeatureMatrix, rows: np.ndarray) -> GarchModel:
        if len(rows) == 0:
            raise ModelFitError("GARCH needs at least one fit row")
        # Row s carries the RV of day s + 1 as target, so returns up to that day are known
        last_row = min(int(np.max(rows)) + 1, len(matrix.days) - 1)
        horizon = matrix.days[last_row]
        returns = np.array([value for day, value in sorted(self.daily_returns.items()) if day <= horizon])
        return fit_garch(returns, self.max_iterations, self.min_observations)

    def predict(self, model: GarchModel, matrix: FeatureMatrix, rows: np.ndarray) -> np.ndarray:
        return self.target_spec.apply(predict(model, matrix, rows, self.daily_returns))


class EnsembleForecaster(ForecasterPort):
    """
    Hybrid GBT + LSTM ensemble. The last fit rows form the validation split
    that sets the LSTM early stopping and the aggregation weights.
    """

    def __init__(self, params: EnsembleParams = EnsembleParams(), validation_size: Optional[int] = None):
        self.params = params
        self.validation_size = validation_size

    @property
    def label(self) -> str:
        return ENSEMBLE_LABEL

    def fit(self, matrix: FeatureMatrix, rows: np.ndarray) -> EnsembleModel:
        rows = np.asarray(rows, dtype=int)
        size = self.validation_size
        if size is None:
            size = max(1, math.ceil(VALIDATION_SHARE * len(rows)))
        if size >= len(rows):
            raise ModelFitError(f"Validation size {size} leaves no training rows out of {len(rows)}")
        return fit_ensemble(matrix, rows[:-size], rows[-size:], self.params)

    def predict(self, model: EnsembleModel, matrix: FeatureMatrix, rows: np.ndarray) -> np.ndarray:
        return predict(model, matrix, rows)
