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

from src.domain.errors import ConfigValidationError, ModelFitError
from src.domain.forecasting.forecasting_data_objects import LstmParams, LstmWeights
from src.domain.forecasting.lstm import (
    AdamOptimizer,
    build_windows,
    clip_gradients,
    fit_lstm,
    forward,
    init_weights,
    loss_and_gradients,
    predict_lstm,
)

SMALL_PARAMS = LstmParams(hidden_size=4, sequence_length=3, batch_size=16, step_size=0.01, epochs=150, patience=150)


def weights_from(parameters: dict) -> LstmWeights:
    return LstmWeights(
        w=parameters["w"],
        u=parameters["u"],
        b=parameters["b"],
        head_w=parameters["head_w"],
        head_b=float(parameters["head_b"]),
    )


def test_forward_Should_output_the_head_bias_When_every_weight_is_zero() -> None:
    # Given
    weights = LstmWeights(w=np.zeros((8, 3)), u=np.zeros((8, 2)), b=np.zeros(8), head_w=np.zeros(2), head_b=0.7)
    sequences = np.random.default_rng(0).standard_normal((5, 4, 3))

    # When
    predictions, cache = forward(weights, sequences)

    # Then
    assert np.allclose(predictions, 0.7), f"Actual predictions = {predictions}"
    assert len(cache) == 4, f"Actual cache length = {len(cache)}"


def test_loss_and_gradients_Should_match_central_finite_differences() -> None:
    # Given
    rng = np.random.default_rng(1)
    weights = init_weights(input_size=2, hidden_size=3, rng=rng)
    sequences = rng.standard_normal((5, 4, 2))
    targets = rng.standard_normal(5)
    step = 1e-6

    # When
    _, gradients = loss_and_gradients(weights, sequences, targets)

    # Then
    parameters = weights.as_dict()
    for name, value in parameters.items():
        numeric = np.zeros_like(value, dtype=float)
        for index in np.ndindex(value.shape):
            shifted_up = {key: np.array(array, dtype=float, copy=True) for key, array in parameters.items()}
            shifted_down = {key: np.array(array, dtype=float, copy=True) for key, array in parameters.items()}
            shifted_up[name][index] += step
            shifted_down[name][index] -= step
            loss_up, _ = loss_and_gradients(weights_from(shifted_up), sequences, targets)
            loss_down, _ = loss_and_gradients(weights_from(shifted_down), sequences, targets)
            numeric[index] = (loss_up - loss_down) / (2 * step)
        gap = float(np.max(np.abs(numeric - gradients[name])))
        assert gap < 1e-4, f"Actual gradient gap for {name} = {gap}"


def test_clip_gradients_Should_rescale_to_the_clip_norm() -> None:
    # Given
    gradients = {"w": np.array([3.0]), "b": np.array([4.0])}

    # When
    clipped, norm = clip_gradients(gradients, 1.0)
    untouched, _ = clip_gradients(gradients, 10.0)

    # Then
    assert norm == pytest.approx(5.0), f"Actual norm = {norm}"
    assert clipped["w"][0] == pytest.approx(0.6) and clipped["b"][0] == pytest.approx(0.8), f"Actual = {clipped}"
    assert untouched["w"][0] == 3.0


def test_adam_optimizer_Should_move_each_parameter_by_the_step_size_on_the_first_update() -> None:
    # Given
    optimizer = AdamOptimizer(step_size=0.1)

    # When
    updated = optimizer.update({"w": np.array([1.0, 1.0])}, {"w": np.array([2.0, -0.5])})

    # Then
    assert np.allclose(updated["w"], [0.9, 1.1], atol=1e-6), f"Actual parameters = {updated['w']}"


def test_build_windows_Should_repeat_the_earliest_values_before_the_first_row() -> None:
    # Given
    features = np.arange(10, dtype=float).reshape(5, 2)
    features[0, 1] = np.nan

    # When
    windows = build_windows(features, np.array([0, 3]), 3)

    # Then
    assert windows.shape == (2, 3, 2), f"Actual shape = {windows.shape}"
    assert windows[0].tolist() == [[0.0, 3.0]] * 3, f"Actual first window = {windows[0]}"
    assert windows[1].tolist() == [[2.0, 3.0], [4.0, 5.0], [6.0, 7.0]], f"Actual second window = {windows[1]}"


def test_build_windows_Should_fail_on_a_column_without_values() -> None:
    # Given
    features = np.full((4, 1), np.nan)

    # When / Then
    with pytest.raises(ModelFitError):
        build_windows(features, np.array([2]), 2)


def test_fit_lstm_Should_converge_to_a_constant_target() -> None:
    # Given
    sequences = np.random.default_rng(2).standard_normal((64, 3, 2))
    targets = np.full(64, 3.0)

    # When
    model = fit_lstm(sequences, targets, SMALL_PARAMS, ("a", "b"))
    predictions = predict_lstm(model, sequences)

    # Then
    assert np.allclose(predictions, 3.0, atol=0.1), f"Actual predictions = {predictions[:5]}"
    assert model.history[model.best_epoch] == min(model.history)


def test_fit_lstm_Should_be_reproducible_for_a_seed() -> None:
    # Given
    rng = np.random.default_rng(3)
    sequences = rng.standard_normal((40, 3, 2))
    targets = sequences[:, -1, 0] + 0.1 * rng.standard_normal(40)
    params = LstmParams(hidden_size=3, sequence_length=3, batch_size=8, epochs=5, patience=5, seed=6)

    # When
    first = predict_lstm(fit_lstm(sequences, targets, params, ("a", "b")), sequences)
    second = predict_lstm(fit_lstm(sequences, targets, params, ("a", "b")), sequences)

    # Then
    assert np.array_equal(first, second), "Same seed should train the same network"


def test_fit_lstm_Should_reject_mismatched_names_and_invalid_params() -> None:
    # When / Then
    with pytest.raises(ModelFitError):
        fit_lstm(np.zeros((4, 3, 2)), np.zeros(4), SMALL_PARAMS, ("a",))
    with pytest.raises(ConfigValidationError):
        LstmParams(hidden_size=0)
