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
from dataclasses import dataclass
from datetime import date
from typing import Dict, Optional, Tuple

import numpy as np

from src.config import DM_SEGMENT_SIZE, DM_SIGNIFICANCE, REFIT_CADENCE
from src.domain.errors import ConfigValidationError, DataError

MSE_LOSS = "MSE"


@dataclass(frozen=True)
class ForecastRecord:
    """
    One out-of-sample forecast.

    Attributes:
        day (date): Forecast target day.
        model (str): Model label.
        prediction (float): Forecast, in target units.
        actual (float): Realized target, same units.
    """

    day: date
    model: str
    prediction: float
    actual: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.actual):
            raise DataError(f"Forecast record {self.model} on {self.day} has no actual value")


@dataclass(frozen=True)
class MetricReport:
    """
    Attributes:
        model (str): Model label.
        mae, mse, mape (float): Mean absolute, squared and absolute percentage errors.
        n (int): Records scored by MAE and MSE.
        mape_excluded (int): Zero-actual records left out of MAPE.
    """

    model: str
    mae: float
    mse: float
    mape: float
    n: int
    mape_excluded: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DataError(f"A metric report needs at least one record, got {self.n}")
        if self.mae < 0 or self.mse < 0 or self.mape < 0:
            raise DataError(f"Metrics of {self.model} must not be negative")

    def to_document(self) -> Dict:
        return {
            "model": self.model,
            "mae": self.mae,
            "mse": self.mse,
            "mape": None if math.isnan(self.mape) else self.mape,
            "n": self.n,
            "mape_excluded": self.mape_excluded,
        }


@dataclass(frozen=True)
class DmSettings:
    """
    Diebold-Mariano options.

    Attributes:
        significance (float): Rejection level of the one-sided test.
        newey_west_lag (int): Bartlett-weighted autocovariance lags of the loss differential, 0 for the sample variance.
        small_sample (bool): Applies the small-sample correction and Student t p-values.
    """

    significance: float = DM_SIGNIFICANCE
    newey_west_lag: int = 0
    small_sample: bool = False

    def __post_init__(self) -> None:
        if not 0 < self.significance < 1:
            raise ConfigValidationError(f"Significance must lie in (0, 1), got {self.significance}")
        if self.newey_west_lag < 0:
            raise ConfigValidationError(f"Newey-West lag must not be negative, got {self.newey_west_lag}")


@dataclass(frozen=True)
class DmResult:
    """
    One-sided Diebold-Mariano test of "model A more accurate than model B"
    under squared loss.

    Attributes:
        statistic (Optional[float]): DM statistic, None when the two error series are indistinguishable.
        p_value (float): One-sided p-value in [0, 1].
        reject_at (float): Significance used for the decision.
        rejected (bool): True when p_value < reject_at.
    """

    model_a: str
    model_b: str
    statistic: Optional[float]
    p_value: float
    reject_at: float
    rejected: bool
    n: int
    loss: str = MSE_LOSS

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_value <= 1.0:
            raise DataError(f"p-value must lie in [0, 1], got {self.p_value}")

    @property
    def indistinguishable(self) -> bool:
        return self.statistic is None

    def to_document(self) -> Dict:
        return {
            "model_a": self.model_a,
            "model_b": self.model_b,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "reject_at": self.reject_at,
            "rejected": self.rejected,
            "n": self.n,
            "loss": self.loss,
        }


@dataclass(frozen=True, eq=False)
class RejectionHeatmap:
    """
    Per ordered model pair, the number of segments whose DM test rejects
    "equal accuracy" in favour of the row model.

    Attributes:
        models (Tuple[str, ...]): Row and column labels.
        counts (np.ndarray): counts[i, j] for the row model i against the column model j.
        segments (int): Number of full segments tested.
        segment_size (int): Forecasts per segment.
        significance (float): Level of each test.
    """

    models: Tuple[str, ...]
    counts: np.ndarray
    segments: int
    segment_size: int = DM_SEGMENT_SIZE
    significance: float = DM_SIGNIFICANCE

    def __post_init__(self) -> None:
        counts = np.array(self.counts, dtype=int, copy=True)
        if counts.shape != (len(self.models), len(self.models)):
            raise DataError(f"Heatmap grid {counts.shape} does not match {len(self.models)} models")
        if counts.size and (counts.min() < 0 or counts.max() > self.segments):
            raise DataError(f"Heatmap counts must lie in [0, {self.segments}]")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    def count(self, model_a: str, model_b: str) -> int:
        return int(self.counts[self.models.index(model_a), self.models.index(model_b)])

    def cell_label(self, model_a: str, model_b: str) -> str:
        return f"{self.count(model_a, model_b)}/{self.segments}"


@dataclass(frozen=True)
class BacktestScheme:
    """
    Walk-forward layout.

    Attributes:
        train_end (date): Last day of the initial fit span.
        test_start (Optional[date]): First forecast target day, the day after train_end when None.
        test_end (Optional[date]): Last forecast target day, open when None.
        refit_cadence (Optional[int]): Forecasts between refits, None for a single fit.
    """

    train_end: date
    test_start: Optional[date] = None
    test_end: Optional[date] = None
    refit_cadence: Optional[int] = REFIT_CADENCE

    def __post_init__(self) -> None:
        if self.refit_cadence is not None and self.refit_cadence < 1:
            raise ConfigValidationError(f"Refit cadence must be at least 1, got {self.refit_cadence}")
        if self.test_start is not None and self.test_start <= self.train_end:
            raise ConfigValidationError(f"Test span starts on {self.test_start}, before the train span ends")
        if self.test_start is not None and self.test_end is not None and self.test_end < self.test_start:
            raise ConfigValidationError("Test span ends before it starts")
