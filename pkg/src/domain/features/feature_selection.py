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
from typing import List, Sequence

import numpy as np

from src.config import SFS_RIDGE_LAMBDA
from src.domain.errors import DataError
from src.domain.features.feature_data_objects import FeatureMatrix, SelectionResult

logger = logging.getLogger(__name__)

# Relative residual energy under which a candidate adds nothing to the selected set
REDUNDANCY_TOLERANCE = 1e-10


def forward_sequential_selection(
    matrix: FeatureMatrix,
    candidates: Sequence[str],
    k: int,
    train_rows: np.ndarray,
    validation_rows: np.ndarray,
    ridge_lambda: float = SFS_RIDGE_LAMBDA,
) -> SelectionResult:
    """
    Greedy forward selection scored by the validation MSE of a ridge proxy
    (intercept plus the selected columns) fitted on the training rows.

    Candidates are visited in lexicographic order and a strictly better score
    is required to replace the running best, so ties go to the lowest name.
    Selection stops at the budget or when no candidate lowers the score.

    Args:
            matrix (FeatureMatrix): Standardized features and target.
            candidates (Sequence[str]): Columns eligible for selection.
            k (int): Feature budget.
            train_rows (np.ndarray): Rows the proxy is fitted on.
            validation_rows (np.ndarray): Rows the proxy is scored on.
            ridge_lambda (float): Ridge penalty of the proxy.

    Returns:
            SelectionResult: Selected names in inclusion order and the score after each inclusion.
    """
    if k < 1:
        raise DataError(f"Selection budget must be at least 1, got {k}")
    if len(validation_rows) == 0:
        raise DataError("Feature selection needs a non-empty validation split")

    y_train = matrix.target[train_rows]
    y_validation = matrix.target[validation_rows]
    if y_train.size == 0 or np.ptp(y_train) == 0:
        raise DataError("Degenerate (constant) target on the training split, selection is meaningless")

    train_columns = {name: matrix.column(name).values[train_rows] for name in candidates}
    validation_columns = {name: matrix.column(name).values[validation_rows] for name in candidates}

    intercept = float(np.mean(y_train))
    current_score = float(np.mean((y_validation - intercept) ** 2))
    baseline_score = current_score

    selected: List[str] = []
    scores: List[float] = []
    remaining = sorted(candidates)
    budget = min(k, len(remaining))

    while len(selected) < budget:
        best_name = None
        best_score = math.inf
        for name in remaining:
            if _is_redundant(train_columns, selected, name):
                continue
            score = _ridge_validation_mse(
                train_columns, validation_columns, selected + [name], y_train, y_validation, ridge_lambda
            )
            if score < best_score:
                best_name, best_score = name, score

        if best_name is None or not best_score < current_score:
            break
        selected.append(best_name)
        scores.append(best_score)
        remaining.remove(best_name)
        current_score = best_score

    logger.info("Selected %d of %d candidate features (budget %d)", len(selected), len(candidates), k)
    return SelectionResult(selected=tuple(selected), scores=tuple(scores), budget=k, baseline_score=baseline_score)


# PRIVATE FUNCTIONS
def _ridge_validation_mse(
    train_columns, validation_columns, names: List[str], y_train, y_validation, ridge_lambda: float
) -> float:
    x_train = np.column_stack([train_columns[name] for name in names])
    x_validation = np.column_stack([validation_columns[name] for name in names])
    x_mean = x_train.mean(axis=0)
    y_mean = y_train.mean()
    centered = x_train - x_mean
    gram = centered.T @ centered + ridge_lambda * np.eye(len(names))
    coefficients = np.linalg.solve(gram, centered.T @ (y_train - y_mean))
    predictions = y_mean + (x_validation - x_mean) @ coefficients
    return float(np.mean((y_validation - predictions) ** 2))


def _is_redundant(train_columns, selected: List[str], candidate: str) -> bool:
    column = train_columns[candidate]
    centered = column - column.mean()
    energy = float(centered @ centered)
    if energy == 0.0:
        return True
    if not selected:
        return False
    basis = np.column_stack([train_columns[name] - train_columns[name].mean() for name in selected])
    coefficients, *_ = np.linalg.lstsq(basis, centered, rcond=None)
    residual = centered - basis @ coefficients
    return float(residual @ residual) <= REDUNDANCY_TOLERANCE * energy
