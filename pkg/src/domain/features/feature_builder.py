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
from datetime import date
from typing import AbstractSet, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.config import HAR_MONTHLY_WINDOW, HAR_WEEKLY_WINDOW
from src.domain.errors import DataError
from src.domain.features.feature_data_objects import (
    EXOGENOUS_COLUMNS,
    HAR_RV_GROUP,
    HARQ_GROUP,
    PRICE_FLUCTUATIONS_GROUP,
    REDUCED_GROUP,
    ExogenousTable,
    FeatureColumn,
    FeatureMatrix,
    FeatureSettings,
    ReductionReport,
    StandardizationConstants,
    TargetSpec,
)
from src.domain.features.feature_selection import forward_sequential_selection
from src.domain.features.kernel_pca import kpca_fit, kpca_transform_rows
from src.domain.realized.realized_data_objects import DailyRealizedMeasures

logger = logging.getLogger(__name__)

VARIANCE_UNIT = "($/MWh)^2"
STANDARDIZED_PREFIX = "z_"
COMPONENT_PREFIX = "kpc_"
BASELINE_GROUPS = frozenset({HAR_RV_GROUP, HARQ_GROUP})


def build_har_lags(
    measures: Sequence[DailyRealizedMeasures], daily_returns: Optional[Dict[date, float]] = None
) -> Tuple[FeatureColumn, ...]:
    """
    Daily, weekly (5-day) and monthly (22-day) averages of RV, CV and J, plus
    the quarticity interaction sqrt(RQ) * RV_d and the leverage term
    RV_d * 1{daily return < 0}. Rows without a full window hold NaN.

    Args:
            measures (Sequence[DailyRealizedMeasures]): Daily measures, any order.
            daily_returns (Optional[Dict[date, float]]): Close-to-close returns by day for the
                leverage term. Days without a return get NaN.

    Returns:
            Tuple[FeatureColumn, ...]: Columns aligned with the measures sorted by day.
    """
    ordered = sorted(measures, key=lambda measure: measure.day)
    if len(ordered) < HAR_MONTHLY_WINDOW:
        raise DataError(f"HAR lags need at least {HAR_MONTHLY_WINDOW} days of measures, got {len(ordered)}")

    columns: List[FeatureColumn] = []
    for prefix, attribute, group in (
        ("RV", "rv", HAR_RV_GROUP),
        ("CV", "cv", PRICE_FLUCTUATIONS_GROUP),
        ("J", "jump", PRICE_FLUCTUATIONS_GROUP),
    ):
        daily = pd.Series([getattr(measure, attribute) for measure in ordered], dtype=float)
        columns.append(FeatureColumn(f"{prefix}_d", daily.to_numpy(), VARIANCE_UNIT, group))
        for suffix, window in (("w", HAR_WEEKLY_WINDOW), ("m", HAR_MONTHLY_WINDOW)):
            averaged = daily.rolling(window, min_periods=window).mean()
            columns.append(FeatureColumn(f"{prefix}_{suffix}", averaged.to_numpy(), VARIANCE_UNIT, group))

    rv = np.array([measure.rv for measure in ordered])
    rq = np.array([measure.rq for measure in ordered])
    columns.append(FeatureColumn("RQ_sqrt_RV_d", np.sqrt(rq) * rv, "($/MWh)^4", HARQ_GROUP))

    returns = daily_returns or {}
    negative = np.array(
        [float(returns[measure.day] < 0) if measure.day in returns else np.nan for measure in ordered]
    )
    columns.append(FeatureColumn("LEV_RV_d", rv * negative, VARIANCE_UNIT, HARQ_GROUP))
    return tuple(columns)


def assemble(
    measures: Sequence[DailyRealizedMeasures],
    exog: Optional[ExogenousTable],
    target_spec: TargetSpec = TargetSpec(),
    disabled_groups: AbstractSet[str] = frozenset(),
    daily_returns: Optional[Dict[date, float]] = None,
) -> FeatureMatrix:
    """
    Align HAR lags and the enabled exogenous groups on the measure days.

    The target of row t is the transform of RV on the next measure day. A row
    is masked when its target or any of its columns is missing. Disabled
    exogenous groups are left out of the matrix. RV and HARQ lags, like a
    disabled price fluctuation group, stay in the matrix for the baselines but
    never among the model features.
    """
    ordered = sorted(measures, key=lambda measure: measure.day)
    days = tuple(measure.day for measure in ordered)

    columns = list(build_har_lags(ordered, daily_returns))

    enabled_exog = [
        name for name, (_, group) in EXOGENOUS_COLUMNS.items() if group not in disabled_groups
    ]
    if exog is not None and enabled_exog:
        row_of_day = {day: row for row, day in enumerate(exog.days)}
        shared = [day for day in days if day in row_of_day]
        if not shared:
            raise DataError("Empty join between realized measures and the exogenous table")
        for name in enabled_exog:
            if name not in exog.columns:
                continue
            source = np.asarray(exog.columns[name], dtype=float)
            values = np.array([source[row_of_day[day]] if day in row_of_day else np.nan for day in days])
            unit, group = EXOGENOUS_COLUMNS[name]
            columns.append(FeatureColumn(name, values, unit, group))

    rv = np.array([measure.rv for measure in ordered])
    next_rv = np.append(rv[1:], np.nan)
    target = target_spec.apply(next_rv)

    stacked = np.column_stack([column.values for column in columns])
    mask = np.isfinite(target) & np.all(np.isfinite(stacked), axis=1)

    model_features = tuple(
        column.name
        for column in columns
        if column.group not in BASELINE_GROUPS
        and not (column.group == PRICE_FLUCTUATIONS_GROUP and PRICE_FLUCTUATIONS_GROUP in disabled_groups)
    )
    logger.info("Assembled %d rows (%d usable) and %d columns", len(days), int(mask.sum()), len(columns))
    return FeatureMatrix(
        days=days,
        columns=tuple(columns),
        target=target,
        target_name=target_spec.name,
        mask=mask,
        model_features=model_features,
    )


def standardize_columns(
    matrix: FeatureMatrix, names: Sequence[str], train_rows: np.ndarray
) -> Tuple[Tuple[FeatureColumn, ...], StandardizationConstants]:
    """
    Z-score the named columns with training-split means and (population)
    standard deviations. Constant columns keep a unit scale.
    """
    if len(train_rows) == 0:
        raise DataError("Standardization needs at least one training row")
    means: Dict[str, float] = {}
    stds: Dict[str, float] = {}
    standardized: List[FeatureColumn] = []
    for name in names:
        column = matrix.column(name)
        training = column.values[train_rows]
        mean = float(np.mean(training))
        std = float(np.std(training))
        if std == 0.0:
            logger.warning("Column %s is constant on the training split", name)
            std = 1.0
        means[name], stds[name] = mean, std
        standardized.append(
            FeatureColumn(f"{STANDARDIZED_PREFIX}{name}", (column.values - mean) / std, "std", column.group)
        )
    return tuple(standardized), StandardizationConstants(means=means, stds=stds)


def reduce_features(
    matrix: FeatureMatrix,
    settings: FeatureSettings,
    train_rows: np.ndarray,
    validation_rows: np.ndarray,
    llm_features: bool = True,
) -> Tuple[FeatureMatrix, ReductionReport]:
    """
    Standardize the model features, then (LLM-augmented feature engineering
    enabled) select up to the budget with forward selection and compress the
    selection with kernel PCA.

    Args:
            matrix (FeatureMatrix): Assembled matrix.
            settings (FeatureSettings): Reduction settings.
            train_rows (np.ndarray): Rows used to fit standardization, selection and KPCA.
            validation_rows (np.ndarray): Rows scoring the selection proxy.
            llm_features (bool): When False, the standardized columns are used as is.

    Returns:
            Tuple[FeatureMatrix, ReductionReport]: Matrix whose model features are the reduced
            columns, and the provenance of the reduction.
    """
    standardized, constants = standardize_columns(matrix, matrix.model_features, train_rows)
    standardized_names = tuple(column.name for column in standardized)
    columns = list(matrix.columns) + list(standardized)
    working = matrix.with_columns(columns, standardized_names)

    if not llm_features:
        return working, ReductionReport(standardization=constants, selection=None, kpca=None)

    selection = forward_sequential_selection(
        working, standardized_names, settings.sfs_budget, train_rows, validation_rows, settings.ridge_lambda
    )
    selected = selection.selected
    if not selected:
        logger.warning("No candidate improved the selection proxy, keeping every standardized column")
        selected = standardized_names

    if not settings.use_kpca:
        return working.with_columns(columns, selected), ReductionReport(constants, selection, None)

    kpca = kpca_fit(working.values(selected, train_rows), settings.kernel, settings.n_components, settings.variance_share)
    if kpca.n_components == 0:
        logger.warning("Kernel PCA kept no component, using the selected columns")
        return working.with_columns(columns, selected), ReductionReport(constants, selection, kpca)

    inputs = working.values(selected)
    finite = np.all(np.isfinite(inputs), axis=1)
    projections = np.full((len(matrix.days), kpca.n_components), np.nan)
    projections[finite] = kpca_transform_rows(kpca, inputs[finite])
    components = tuple(
        FeatureColumn(f"{COMPONENT_PREFIX}{index + 1}", projections[:, index], "", REDUCED_GROUP)
        for index in range(kpca.n_components)
    )
    component_names = tuple(component.name for component in components)
    model_features = component_names if settings.kpca_mode == "replace" else tuple(selected) + component_names
    logger.info(
        "Kernel PCA kept %d components (%.1f%% of centered kernel variance)",
        kpca.n_components,
        100 * kpca.explained_share,
    )
    return working.with_columns(columns + list(components), model_features), ReductionReport(constants, selection, kpca)
