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

import numpy as np
import pytest

from src.domain.errors import ConfigValidationError, ModelFitError, SchemaMismatchError
from src.domain.forecasting import ensemble
from src.domain.forecasting.ensemble import (
    GBT_PREDICTION_COLUMN,
    combine,
    early_stopping_split,
    ensemble_weights,
    fit_ensemble,
    out_of_fold_gbt,
    predict_ensemble,
    submodel_predictions,
)
from src.domain.forecasting.forecasters import ENSEMBLE_LABEL, EnsembleForecaster, HarForecaster
from src.domain.forecasting.forecasting_data_objects import EnsembleParams, GbtParams, LstmParams
from src.domain.forecasting.gbt import fit_gbt, predict_gbt
from src.domain.forecasting.har import fit_har
from src.domain.forecasting.predictor import predict
from tests.unit.helper import matrix_from_columns

GBT_PARAMS = GbtParams(n_rounds=20, max_depth=2, learning_rate=0.2, subsample=1.0)
LSTM_PARAMS = LstmParams(hidden_size=3, sequence_length=3, batch_size=16, epochs=4, patience=4)
TRAIN_ROWS = np.arange(90)
VALIDATION_ROWS = np.arange(90, 120)


def regression_matrix(rows: int = 130, seed: int = 0):
    rng = np.random.default_rng(seed)
    x1 = rng.standard_normal(rows)
    x2 = rng.standard_normal(rows)
    return matrix_from_columns({"x1": x1, "x2": x2}, x1 + 0.3 * x2**2 + 0.1 * rng.standard_normal(rows))


def test_ensemble_weights_Should_favor_the_submodel_with_smaller_residuals() -> None:
    # Given / When
    weights, combined = combine(np.array([2.0]), np.array([4.0]), 1.0, 3.0)

    # Then
    assert weights == (0.75, 0.25), f"Actual weights = {weights}"
    assert combined[0] == pytest.approx(2.5), f"Actual combined = {combined}"


def test_ensemble_weights_Should_be_symmetric_and_handle_zero_residuals() -> None:
    # Given / When / Then
    omega1, omega2 = ensemble_weights(0.2, 0.7)
    assert ensemble_weights(0.7, 0.2) == pytest.approx((omega2, omega1)), "Swapping residuals swaps the weights"
    assert ensemble_weights(0.0, 0.4) == (1.0, 0.0)
    assert ensemble_weights(0.0, 0.0) == (0.5, 0.5)
    with pytest.raises(ModelFitError):
        ensemble_weights(-0.1, 0.4)


def test_combine_Should_stay_between_the_submodel_predictions() -> None:
    # Given
    rng = np.random.default_rng(0)
    f1, f2 = rng.standard_normal(50), rng.standard_normal(50)

    # When
    _, combined = combine(f1, f2, 0.3, 0.9)
    _, identical = combine(f1, f1, 0.3, 0.9)

    # Then
    assert np.all(combined >= np.minimum(f1, f2) - 1e-12) and np.all(combined <= np.maximum(f1, f2) + 1e-12)
    assert np.allclose(identical, f1), "Identical predictions should combine to themselves"
    with pytest.raises(ModelFitError):
        combine(f1, f2[:10], 0.3, 0.9)


def test_fit_ensemble_Should_give_the_gbt_full_weight_When_the_lstm_is_disabled() -> None:
    # Given
    matrix = regression_matrix()
    params = EnsembleParams(gbt=GBT_PARAMS, lstm=LSTM_PARAMS, use_lstm=False)

    # When
    model = fit_ensemble(matrix, TRAIN_ROWS, VALIDATION_ROWS, params)
    rows = np.arange(120, 129)

    # Then
    assert (model.omega1, model.omega2) == (0.0, 1.0), f"Actual weights = {(model.omega1, model.omega2)}"
    assert model.lstm is None
    expected = predict_gbt(model.gbt, matrix.values(("x1", "x2"), rows))
    assert np.allclose(predict_ensemble(model, matrix, rows), expected)


def test_fit_ensemble_Should_weight_the_submodel_predictions_by_validation_residuals() -> None:
    # Given
    matrix = regression_matrix(seed=1)
    params = EnsembleParams(gbt=GBT_PARAMS, lstm=LSTM_PARAMS)
    rows = np.arange(120, 129)

    # When
    model = fit_ensemble(matrix, TRAIN_ROWS, VALIDATION_ROWS, params)
    lstm_predictions, gbt_predictions = submodel_predictions(model, matrix, rows)
    predictions = predict_ensemble(model, matrix, rows)

    # Then
    assert model.omega1 + model.omega2 == pytest.approx(1.0)
    assert model.omega1 == pytest.approx(model.epsilon2 / (model.epsilon1 + model.epsilon2))
    assert model.lstm.feature_names == ("x1", "x2", GBT_PREDICTION_COLUMN), f"Actual = {model.lstm.feature_names}"
    assert np.allclose(predictions, model.omega1 * lstm_predictions + model.omega2 * gbt_predictions)


def test_fit_ensemble_Should_require_a_validation_split_and_one_submodel() -> None:
    # Given
    matrix = regression_matrix()

    # When / Then
    with pytest.raises(ModelFitError):
        fit_ensemble(matrix, TRAIN_ROWS, np.array([], dtype=int), EnsembleParams(gbt=GBT_PARAMS, use_lstm=False))
    with pytest.raises(ConfigValidationError):
        EnsembleParams(use_gbt=False, use_lstm=False)


def test_predict_Should_raise_a_schema_mismatch_When_fit_columns_are_missing() -> None:
    # Given
    matrix = regression_matrix()
    model = fit_ensemble(matrix, TRAIN_ROWS, VALIDATION_ROWS, EnsembleParams(gbt=GBT_PARAMS, use_lstm=False))
    renamed = matrix_from_columns({"x1": np.zeros(130), "x3": np.zeros(130)}, np.zeros(130))

    # When / Then
    with pytest.raises(SchemaMismatchError) as error:
        predict(model, renamed, np.arange(5))
    assert error.value.missing == ("x2",), f"Actual missing = {error.value.missing}"
    with pytest.raises(TypeError):
        predict(object(), matrix, np.arange(5))


def test_predict_Should_dispatch_har_models_to_the_regression() -> None:
    # Given
    rng = np.random.default_rng(2)
    columns = {name: rng.uniform(0.5, 2.0, 100) for name in ("CV_d", "CV_w", "CV_m", "J_d")}
    matrix = matrix_from_columns(columns, 1.0 + columns["CV_d"])
    forecaster = HarForecaster()

    # When
    model = forecaster.fit(matrix, np.arange(80))
    predictions = forecaster.predict(model, matrix, np.arange(80, 100))

    # Then
    assert model == fit_har(matrix, rows=np.arange(80))
    assert np.allclose(predictions, matrix.target[80:100]), f"Actual predictions = {predictions}"


def test_ensemble_forecaster_Should_hold_out_the_last_fit_rows_for_validation() -> None:
    # Given
    matrix = regression_matrix()
    forecaster = EnsembleForecaster(EnsembleParams(gbt=GBT_PARAMS, use_lstm=False), validation_size=30)

    # When
    model = forecaster.fit(matrix, np.arange(120))
    direct = fit_ensemble(matrix, TRAIN_ROWS, VALIDATION_ROWS, EnsembleParams(gbt=GBT_PARAMS, use_lstm=False))

    # Then
    assert forecaster.label == ENSEMBLE_LABEL
    assert model.epsilon2 == pytest.approx(direct.epsilon2), f"Actual eps2 = {model.epsilon2}"
    with pytest.raises(ModelFitError):
        EnsembleForecaster(validation_size=10).fit(matrix, np.arange(10))


def test_out_of_fold_gbt_Should_score_each_fold_with_trees_fit_on_the_other_folds() -> None:
    # Given
    matrix = regression_matrix(seed=3)
    inputs = matrix.values(("x1", "x2"))
    params = EnsembleParams(gbt=GBT_PARAMS, use_lstm=False)

    # When
    predictions = out_of_fold_gbt(inputs, matrix.target, TRAIN_ROWS, params, ("x1", "x2"))

    # Then
    first_fold = np.arange(18)
    others = np.arange(18, 90)
    fold_model = fit_gbt(inputs[others], matrix.target[others], GBT_PARAMS, ("x1", "x2"))
    full_model = fit_gbt(inputs[TRAIN_ROWS], matrix.target[TRAIN_ROWS], GBT_PARAMS, ("x1", "x2"))
    expected = predict_gbt(fold_model, inputs[first_fold])
    in_sample = predict_gbt(full_model, inputs[TRAIN_ROWS])
    assert predictions.shape == (90,) and np.all(np.isfinite(predictions)), f"Actual predictions = {predictions}"
    assert np.allclose(predictions[first_fold], expected), f"Actual first fold = {predictions[first_fold]}"
    in_sample_mae = np.mean(np.abs(in_sample - matrix.target[TRAIN_ROWS]))
    out_of_fold_mae = np.mean(np.abs(predictions - matrix.target[TRAIN_ROWS]))
    assert out_of_fold_mae > in_sample_mae, f"Actual MAE = {out_of_fold_mae} vs in-sample {in_sample_mae}"


def test_out_of_fold_gbt_Should_fall_back_to_in_sample_fits_When_folds_leave_too_few_rows() -> None:
    # Given
    matrix = regression_matrix(seed=3)
    inputs = matrix.values(("x1", "x2"))
    rows = np.arange(60)

    # When
    predictions = out_of_fold_gbt(inputs, matrix.target, rows, EnsembleParams(gbt=GBT_PARAMS), ("x1", "x2"))

    # Then
    expected = predict_gbt(fit_gbt(inputs[rows], matrix.target[rows], GBT_PARAMS, ("x1", "x2")), inputs[rows])
    assert np.allclose(predictions, expected), f"Actual predictions = {predictions}"


def test_early_stopping_split_Should_hold_out_the_trailing_training_block() -> None:
    # Given / When
    fit_rows, stopping_rows = early_stopping_split(TRAIN_ROWS)
    single_fit, single_stop = early_stopping_split(np.array([4]))

    # Then
    assert np.array_equal(fit_rows, np.arange(72)), f"Actual fit rows = {fit_rows}"
    assert np.array_equal(stopping_rows, np.arange(72, 90)), f"Actual stopping rows = {stopping_rows}"
    assert np.array_equal(single_fit, [4]) and len(single_stop) == 0, f"Actual split = {single_fit}, {single_stop}"


def test_fit_ensemble_Should_early_stop_the_lstm_on_training_rows_and_weight_on_validation_rows(mocker) -> None:
    # Given
    matrix = regression_matrix(seed=4)
    params = EnsembleParams(gbt=GBT_PARAMS, lstm=LSTM_PARAMS)
    spy = mocker.spy(ensemble, "fit_lstm")

    # When
    model = fit_ensemble(matrix, TRAIN_ROWS, VALIDATION_ROWS, params)

    # Then
    sequences, targets = spy.call_args.args[0], spy.call_args.args[1]
    stopping_windows, stopping_targets = spy.call_args.kwargs["validation"]
    assert sequences.shape[0] == 72 and len(targets) == 72, f"Actual fit windows = {sequences.shape}"
    assert stopping_windows.shape[0] == 18, f"Actual stopping windows = {stopping_windows.shape}"
    assert len(stopping_targets) == 18, f"Actual stopping targets = {len(stopping_targets)}"
    lstm_predictions, gbt_predictions = submodel_predictions(model, matrix, VALIDATION_ROWS)
    y_validation = matrix.target[VALIDATION_ROWS]
    eps1 = np.mean(np.abs(y_validation - lstm_predictions))
    eps2 = np.mean(np.abs(y_validation - gbt_predictions))
    assert model.epsilon1 == pytest.approx(eps1), f"Actual eps1 = {model.epsilon1}"
    assert model.epsilon2 == pytest.approx(eps2), f"Actual eps2 = {model.epsilon2}"


def test_fit_ensemble_Should_train_the_lstm_on_the_residual_of_the_out_of_fold_gbt(mocker) -> None:
    # Given
    matrix = regression_matrix(seed=5)
    params = EnsembleParams(gbt=GBT_PARAMS, lstm=LSTM_PARAMS)
    spy = mocker.spy(ensemble, "fit_lstm")

    # When
    fit_ensemble(matrix, TRAIN_ROWS, VALIDATION_ROWS, params)

    # Then
    stacked = out_of_fold_gbt(matrix.values(("x1", "x2")), matrix.target, TRAIN_ROWS, params, ("x1", "x2"))
    sequences, targets = spy.call_args.args[0], spy.call_args.args[1]
    assert np.allclose(targets, matrix.target[:72] - stacked[:72]), f"Actual targets = {targets}"
    assert np.allclose(sequences[:, -1, 2], stacked[:72]), "The GBT column of training windows should be out-of-fold"
