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
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm, t

from src.config import DM_MIN_LENGTH, DM_SEGMENT_SIZE
from src.domain.errors import ConfigValidationError, DataError
from src.domain.evaluation.evaluation_data_objects import (
    DmResult,
    DmSettings,
    ForecastRecord,
    MetricReport,
    RejectionHeatmap,
)

logger = logging.getLogger(__name__)


def metrics(records: Sequence[ForecastRecord]) -> MetricReport:
    """
    MAE, MSE and MAPE of one model's records. Records with a zero actual are
    left out of MAPE and counted; MAPE is NaN when every actual is zero.
    """
    if not records:
        raise DataError("Cannot score an empty record set")
    models = {record.model for record in records}
    if len(models) != 1:
        raise DataError(f"Records mix several models: {', '.join(sorted(models))}")

    predictions = np.array([record.prediction for record in records])
    actuals = np.array([record.actual for record in records])
    errors = predictions - actuals
    nonzero = actuals != 0
    excluded = int((~nonzero).sum())
    if excluded:
        logger.warning("%d records with a zero actual left out of MAPE for %s", excluded, records[0].model)
    mape = float(np.mean(np.abs(errors[nonzero] / actuals[nonzero]))) if nonzero.any() else math.nan
    return MetricReport(
        model=records[0].model,
        mae=float(np.mean(np.abs(errors))),
        mse=float(np.mean(errors**2)),
        mape=mape,
        n=len(records),
        mape_excluded=excluded,
    )


def long_run_variance(differential: np.ndarray, lag: int = 0) -> float:
    """
    Bartlett-weighted (Newey-West) long-run variance; lag 0 is the sample
    variance with denominator n.
    """
    centered = differential - differential.mean()
    n = centered.size
    variance = float(centered @ centered) / n
    for k in range(1, min(lag, n - 1) + 1):
        autocovariance = float(centered[k:] @ centered[:-k]) / n
        variance += 2.0 * (1.0 - k / (lag + 1)) * autocovariance
    return variance


def dm_test(
    errors_a: Sequence[float],
    errors_b: Sequence[float],
    settings: DmSettings = DmSettings(),
    model_a: str = "A",
    model_b: str = "B",
) -> DmResult:
    """
    One-sided Diebold-Mariano test on squared-error differentials
    d_t = e_a,t^2 - e_b,t^2. The alternative is "A more accurate" (negative
    statistic).

    Args:
            errors_a (Sequence[float]): Forecast errors of model A.
            errors_b (Sequence[float]): Forecast errors of model B, aligned with A's.
            settings (DmSettings): Significance, long-run variance lag and small-sample correction.
            model_a, model_b (str): Labels carried to the result.

    Returns:
            DmResult: Statistic (None when every differential is zero), p-value and decision.
    """
    a = np.asarray(errors_a, dtype=float)
    b = np.asarray(errors_b, dtype=float)
    if a.shape != b.shape:
        raise DataError(f"Error series differ in length: {a.size} and {b.size}")
    if a.size < DM_MIN_LENGTH:
        raise DataError(f"The DM test needs at least {DM_MIN_LENGTH} forecasts, got {a.size}")

    differential = a**2 - b**2
    n = differential.size
    if not np.any(differential):
        return DmResult(model_a, model_b, None, 1.0, settings.significance, False, n)

    mean = float(differential.mean())
    variance = long_run_variance(differential, settings.newey_west_lag)
    if variance <= 0:
        statistic = -math.inf if mean < 0 else math.inf
    else:
        statistic = mean / math.sqrt(variance / n)

    if settings.small_sample:
        statistic *= math.sqrt((n - 1) / n)
        p_value = float(t.cdf(statistic, df=n - 1))
    else:
        p_value = float(norm.cdf(statistic))
    return DmResult(model_a, model_b, statistic, p_value, settings.significance, p_value < settings.significance, n)


def aligned_errors(records_by_model: Dict[str, Sequence[ForecastRecord]]) -> Tuple[Tuple, Dict[str, np.ndarray]]:
    """
    Errors of every model on the days all models forecast, by increasing day.
    """
    if not records_by_model:
        raise DataError("No forecast records to compare")
    shared = None
    for records in records_by_model.values():
        days = {record.day for record in records}
        shared = days if shared is None else shared & days
    days = tuple(sorted(shared or ()))
    errors: Dict[str, np.ndarray] = {}
    for model, records in records_by_model.items():
        by_day = {record.day: record.prediction - record.actual for record in records}
        errors[model] = np.array([by_day[day] for day in days])
    return days, errors


def rejection_heatmap(
    records_by_model: Dict[str, Sequence[ForecastRecord]],
    segment_size: int = DM_SEGMENT_SIZE,
    settings: DmSettings = DmSettings(),
) -> RejectionHeatmap:
    """
    Splits the common forecast days into consecutive segments (the trailing
    partial segment is dropped) and counts, per ordered model pair, the
    segments where the DM test rejects in favour of the row model.
    """
    if segment_size < DM_MIN_LENGTH:
        raise ConfigValidationError(f"Segments need at least {DM_MIN_LENGTH} forecasts, got {segment_size}")
    days, errors = aligned_errors(records_by_model)
    segments = len(days) // segment_size
    if segments < 1:
        raise DataError(f"At least {segment_size} common forecasts are needed, got {len(days)}")

    models = tuple(records_by_model)
    counts = np.zeros((len(models), len(models)), dtype=int)
    for i, model_a in enumerate(models):
        for j, model_b in enumerate(models):
            if i == j:
                continue
            for segment in range(segments):
                window = slice(segment * segment_size, (segment + 1) * segment_size)
                result = dm_test(errors[model_a][window], errors[model_b][window], settings, model_a, model_b)
                counts[i, j] += int(result.rejected)
    return RejectionHeatmap(
        models=models,
        counts=counts,
        segments=segments,
        segment_size=segment_size,
        significance=settings.significance,
    )


def pairwise_dm(
    records_by_model: Dict[str, Sequence[ForecastRecord]], settings: DmSettings = DmSettings()
) -> Tuple[DmResult, ...]:
    """
    Full-span DM test of every ordered model pair.
    """
    _, errors = aligned_errors(records_by_model)
    results: List[DmResult] = []
    for model_a in records_by_model:
        for model_b in records_by_model:
            if model_a != model_b:
                results.append(dm_test(errors[model_a], errors[model_b], settings, model_a, model_b))
    return tuple(results)


def records_by_model(records: Sequence[ForecastRecord], models: Optional[Sequence[str]] = None) -> Dict[str, List]:
    grouped: Dict[str, List[ForecastRecord]] = {model: [] for model in models or ()}
    for record in records:
        grouped.setdefault(record.model, []).append(record)
    return grouped
