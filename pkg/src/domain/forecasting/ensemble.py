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

import dataclasses
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from src.config import EARLY_STOPPING_SHARE, STACKING_FOLDS
from src.domain.errors import ModelFitError
from src.domain.features.feature_data_objects import FeatureMatrix
from src.domain.forecasting.forecasting_data_objects import EnsembleModel, EnsembleParams
from src.domain.forecasting.gbt import GBT_MIN_ROWS, fit_gbt, predict_gbt
from src.domain.forecasting.lstm import build_windows, fit_lstm, predict_lstm

logger = logging.getLogger(__name__)

GBT_PREDICTION_COLUMN = "gbt_prediction"


def ensemble_weights(eps1: float, eps2: float) -> Tuple[float, float]:
    """
    Weights inversely proportional to the submodel residual magnitudes:
    omega1 = eps2 / (eps1 + eps2) for the LSTM, omega2 = eps1 / (eps1 + eps2)
    for the GBT, and an even split when both residuals vanish.
    """
    if eps1 < 0 or eps2 < 0:
        raise ModelFitError(f"Residual magnitudes must not be negative, got ({eps1}, {eps2})")
    total = eps1 + eps2
    if total == 0:
        return 0.5, 0.5
    omega1 = eps2 / total
    return omega1, 1.0 - omega1


def combine(
    f1: np.ndarray, f2: np.ndarray, eps1: float, eps2: float
) -> Tuple[Tuple[float, float], np.ndarray]:
    f1 = np.asarray(f1, dtype=float)
    f2 = np.asarray(f2, dtype=float)
    if f1.shape != f2.shape:
        raise ModelFitError(f"Prediction vectors differ in shape: {f1.shape} and {f2.shape}")
    weights = ensemble_weights(eps1, eps2)
    return weights, weights[0] * f1 + weights[1] * f2


def fit_ensemble(
    matrix: FeatureMatrix, train_rows: np.ndarray, validation_rows: np.ndarray, params: EnsembleParams
) -> EnsembleModel:
    """
    Two-stage fit. Boosted trees come first; the LSTM then reads windows of the
    model features extended with the GBT prediction column and learns the
    correction to add to it. On training rows that column holds out-of-fold
    predictions, so the LSTM sees GBT errors of the same kind as on unseen days.

    The LSTM early-stops on a trailing block of the training rows. Both
    residual magnitudes, and hence the aggregation weights, come from the
    validation rows only.
    """
    if len(validation_rows) == 0:
        raise ModelFitError("The ensemble needs a non-empty validation split")
    features = matrix.model_features
    if not features:
        raise ModelFitError("The ensemble needs at least one model feature")

    train_rows = np.asarray(train_rows, dtype=int)
    inputs = matrix.values(features)
    target = matrix.target
    y_validation = target[validation_rows]

    gbt = None
    gbt_all: Optional[np.ndarray] = None
    if params.use_gbt:
        gbt = fit_gbt(inputs[train_rows], target[train_rows], params.gbt, features)
        gbt_all = _gbt_over_rows(gbt, inputs)

    lstm = None
    if params.use_lstm:
        stacked = gbt_all
        if gbt_all is not None:
            stacked = gbt_all.copy()
            stacked[train_rows] = out_of_fold_gbt(inputs, target, train_rows, params, features)
        lstm_inputs, lstm_names = _lstm_inputs(inputs, features, stacked)
        lstm_target = target if stacked is None else target - stacked
        fit_rows, stopping_rows = early_stopping_split(train_rows)
        length = params.lstm.sequence_length
        validation = None
        if len(stopping_rows):
            validation = (build_windows(lstm_inputs, stopping_rows, length), lstm_target[stopping_rows])
        lstm = fit_lstm(
            build_windows(lstm_inputs, fit_rows, length),
            lstm_target[fit_rows],
            params.lstm,
            lstm_names,
            validation=validation,
        )

    model = EnsembleModel(
        gbt=gbt,
        lstm=lstm,
        epsilon1=math.nan,
        epsilon2=math.nan,
        omega1=0.0 if lstm is None else (1.0 if gbt is None else 0.5),
        omega2=0.0 if gbt is None else (1.0 if lstm is None else 0.5),
        feature_names=tuple(features),
    )
    lstm_validation, gbt_validation = submodel_predictions(model, matrix, validation_rows)
    eps1 = math.nan if lstm_validation is None else float(np.mean(np.abs(y_validation - lstm_validation)))
    eps2 = math.nan if gbt_validation is None else float(np.mean(np.abs(y_validation - gbt_validation)))

    if lstm is None:
        omega1, omega2 = 0.0, 1.0
    elif gbt is None:
        omega1, omega2 = 1.0, 0.0
    else:
        omega1, omega2 = ensemble_weights(eps1, eps2)

    logger.info("Ensemble weights: lstm=%.4f gbt=%.4f (eps1=%.6g, eps2=%.6g)", omega1, omega2, eps1, eps2)
    return dataclasses.replace(model, epsilon1=eps1, epsilon2=eps2, omega1=omega1, omega2=omega2)


def out_of_fold_gbt(
    inputs: np.ndarray, target: np.ndarray, train_rows: np.ndarray, params: EnsembleParams, features: Sequence[str]
) -> np.ndarray:
    """
    GBT predictions for the training rows, each contiguous fold scored by trees
    fit on the other folds. Falls back to in-sample predictions when a fold
    would leave too few rows to fit on.
    """
    train_rows = np.asarray(train_rows, dtype=int)
    folds = np.array_split(np.arange(len(train_rows)), min(STACKING_FOLDS, len(train_rows)))
    if len(folds) < 2 or len(train_rows) - max(len(fold) for fold in folds) < GBT_MIN_ROWS:
        logger.warning("Too few training rows for %d stacking folds, the LSTM reads in-sample GBT fits", STACKING_FOLDS)
        full = fit_gbt(inputs[train_rows], target[train_rows], params.gbt, features)
        return predict_gbt(full, inputs[train_rows])

    predictions = np.full(len(train_rows), np.nan)
    for fold in folds:
        kept = np.setdiff1d(np.arange(len(train_rows)), fold)
        fold_gbt = fit_gbt(inputs[train_rows[kept]], target[train_rows[kept]], params.gbt, features)
        predictions[fold] = predict_gbt(fold_gbt, inputs[train_rows[fold]])
    return predictions


def early_stopping_split(train_rows: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Leading rows to fit the LSTM on and the trailing block that decides when
    it stops. The block is empty when the training rows are too few to split.
    """
    train_rows = np.asarray(train_rows, dtype=int)
    size = int(round(len(train_rows) * EARLY_STOPPING_SHARE))
    if size == 0 or size >= len(train_rows):
        return train_rows, train_rows[:0]
    return train_rows[:-size], train_rows[-size:]


def submodel_predictions(
    model: EnsembleModel, matrix: FeatureMatrix, rows: np.ndarray
) -> Tuple[Optional[np.ndarray], Optional[np.ndarray]]:
    """
    Returns:
            Tuple[Optional[np.ndarray], Optional[np.ndarray]]: LSTM and GBT predictions on the
            rows, None for a disabled submodel. With both submodels the LSTM
            prediction is the GBT prediction plus the learned correction.
    """
    inputs = matrix.values(model.feature_names)
    gbt_all = _gbt_over_rows(model.gbt, inputs) if model.gbt is not None else None
    gbt_predictions = gbt_all[rows] if gbt_all is not None else None
    lstm_predictions = None
    if model.lstm is not None:
        lstm_inputs, _ = _lstm_inputs(inputs, model.feature_names, gbt_all)
        windows = build_windows(lstm_inputs, rows, model.lstm.params.sequence_length)
        lstm_predictions = predict_lstm(model.lstm, windows)
        if gbt_predictions is not None:
            lstm_predictions = gbt_predictions + lstm_predictions
    return lstm_predictions, gbt_predictions


def predict_ensemble(model: EnsembleModel, matrix: FeatureMatrix, rows: np.ndarray) -> np.ndarray:
    lstm_predictions, gbt_predictions = submodel_predictions(model, matrix, rows)
    if lstm_predictions is None:
        return gbt_predictions  # type: ignore[return-value]
    if gbt_predictions is None:
        return lstm_predictions
    return model.omega1 * lstm_predictions + model.omega2 * gbt_predictions


# PRIVATE FUNCTIONS
def _gbt_over_rows(gbt, inputs: np.ndarray) -> np.ndarray:
    finite = np.all(np.isfinite(inputs), axis=1)
    predictions = np.full(inputs.shape[0], np.nan)
    predictions[finite] = predict_gbt(gbt, inputs[finite])
    return predictions


def _lstm_inputs(
    inputs: np.ndarray, features: Tuple[str, ...], gbt_all: Optional[np.ndarray]
) -> Tuple[np.ndarray, Tuple[str, ...]]:
    if gbt_all is None:
        return inputs, tuple(features)
    return np.column_stack([inputs, gbt_all]), tuple(features) + (GBT_PREDICTION_COLUMN,)
