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
import pandas as pd
from scipy.special import expit

from src.domain.errors import ModelFitError, NonFiniteLossError
from src.domain.forecasting.forecasting_data_objects import LstmModel, LstmParams, LstmWeights

logger = logging.getLogger(__name__)

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8
FORGET_BIAS = 1.0

Cache = List[Dict[str, np.ndarray]]


def init_weights(input_size: int, hidden_size: int, rng: np.random.Generator) -> LstmWeights:
    bound = 1.0 / math.sqrt(hidden_size)
    bias = np.zeros(4 * hidden_size)
    bias[hidden_size : 2 * hidden_size] = FORGET_BIAS
    return LstmWeights(
        w=rng.uniform(-bound, bound, size=(4 * hidden_size, input_size)),
        u=rng.uniform(-bound, bound, size=(4 * hidden_size, hidden_size)),
        b=bias,
        head_w=rng.uniform(-bound, bound, size=hidden_size),
        head_b=0.0,
    )


def forward(weights: LstmWeights, sequences: np.ndarray) -> Tuple[np.ndarray, Cache]:
    """
    Run the cell over (B, L, D) sequences from zero states and apply the
    linear head to the last hidden state.

    Returns:
            Tuple[np.ndarray, Cache]: Predictions (B,) and per-step activations for backward().
    """
    batch, length, _ = sequences.shape
    hidden = weights.hidden_size
    h = np.zeros((batch, hidden))
    c = np.zeros((batch, hidden))
    cache: Cache = []
    for step in range(length):
        x = sequences[:, step, :]
        z = x @ weights.w.T + h @ weights.u.T + weights.b
        i = expit(z[:, :hidden])
        f = expit(z[:, hidden : 2 * hidden])
        g = np.tanh(z[:, 2 * hidden : 3 * hidden])
        o = expit(z[:, 3 * hidden :])
        c_previous, h_previous = c, h
        c = f * c_previous + i * g
        tanh_c = np.tanh(c)
        h = o * tanh_c
        cache.append(
            {"x": x, "i": i, "f": f, "g": g, "o": o, "c_prev": c_previous, "h_prev": h_previous, "tanh_c": tanh_c}
        )
    return h @ weights.head_w + weights.head_b, cache


def loss_and_gradients(
    weights: LstmWeights, sequences: np.ndarray, targets: np.ndarray
) -> Tuple[float, Dict[str, np.ndarray]]:
    """
    Mean squared error of the head output and its gradients by backpropagation
    through time.
    """
    predictions, cache = forward(weights, sequences)
    batch = sequences.shape[0]
    hidden = weights.hidden_size
    errors = predictions - targets
    loss = float(np.mean(errors**2))

    d_prediction = 2.0 * errors / batch
    last_h = cache[-1]["o"] * cache[-1]["tanh_c"]
    gradients = {
        "w": np.zeros_like(weights.w),
        "u": np.zeros_like(weights.u),
        "b": np.zeros_like(weights.b),
        "head_w": last_h.T @ d_prediction,
        "head_b": np.array(d_prediction.sum()),
    }

    dh = np.outer(d_prediction, weights.head_w)
    dc = np.zeros((batch, hidden))
    for step in reversed(cache):
        do = dh * step["tanh_c"]
        dc = dc + dh * step["o"] * (1 - step["tanh_c"] ** 2)
        di = dc * step["g"]
        dg = dc * step["i"]
        df = dc * step["c_prev"]
        dz = np.concatenate(
            (
                di * step["i"] * (1 - step["i"]),
                df * step["f"] * (1 - step["f"]),
                dg * (1 - step["g"] ** 2),
                do * step["o"] * (1 - step["o"]),
            ),
            axis=1,
        )
        gradients["w"] += dz.T @ step["x"]
        gradients["u"] += dz.T @ step["h_prev"]
        gradients["b"] += dz.sum(axis=0)
        dh = dz @ weights.u
        dc = dc * step["f"]
    return loss, gradients


def clip_gradients(gradients: Dict[str, np.ndarray], clip_norm: float) -> Tuple[Dict[str, np.ndarray], float]:
    norm = math.sqrt(sum(float(np.sum(gradient**2)) for gradient in gradients.values()))
    if norm > clip_norm:
        scale = clip_norm / norm
        gradients = {name: gradient * scale for name, gradient in gradients.items()}
    return gradients, norm


class AdamOptimizer:
    """
    Adaptive-moment updates over the named LSTM parameters.
    """

    def __init__(self, step_size: float):
        self.step_size = step_size
        self.__moments: Dict[str, np.ndarray] = {}
        self.__squares: Dict[str, np.ndarray] = {}
        self.__steps = 0

    def update(self, parameters: Dict[str, np.ndarray], gradients: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
        self.__steps += 1
        updated = {}
        for name, value in parameters.items():
            gradient = gradients[name]
            moment = ADAM_BETA1 * self.__moments.get(name, np.zeros_like(value)) + (1 - ADAM_BETA1) * gradient
            square = ADAM_BETA2 * self.__squares.get(name, np.zeros_like(value)) + (1 - ADAM_BETA2) * gradient**2
            self.__moments[name], self.__squares[name] = moment, square
            corrected_moment = moment / (1 - ADAM_BETA1**self.__steps)
            corrected_square = square / (1 - ADAM_BETA2**self.__steps)
            updated[name] = value - self.step_size * corrected_moment / (np.sqrt(corrected_square) + ADAM_EPSILON)
        return updated


def build_windows(features: np.ndarray, rows: np.ndarray, length: int) -> np.ndarray:
    """
    Sequences of the `length` rows ending at each requested row. Rows before
    the first observation, or with leading missing values, repeat the earliest
    available values.

    Args:
            features (np.ndarray): Day-indexed inputs (T, D).
            rows (np.ndarray): End rows of the windows.
            length (int): Window length L.

    Returns:
            np.ndarray: Windows (len(rows), L, D).
    """
    padded = pd.DataFrame(features).bfill().ffill().to_numpy(dtype=float)
    if not np.all(np.isfinite(padded)):
        raise ModelFitError("LSTM inputs hold a column without any value")
    offsets = np.arange(-length + 1, 1)
    indices = np.clip(np.asarray(rows, dtype=int)[:, None] + offsets[None, :], 0, None)
    return padded[indices]


def fit_lstm(
    sequences: np.ndarray,
    targets: np.ndarray,
    params: LstmParams,
    feature_names: Sequence[str],
    validation: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> LstmModel:
    """
    Mini-batch Adam training with global-norm clipping and early stopping on
    the validation MSE (training MSE without a validation set). The parameters
    of the best epoch are kept.

    Args:
            sequences (np.ndarray): Training windows (N, L, D).
            targets (np.ndarray): Next-day targets (N,).
            params (LstmParams): Training parameters, the seed fixes initialization and shuffling.
            feature_names (Sequence[str]): Per-step input columns.
            validation (Optional[Tuple[np.ndarray, np.ndarray]]): Validation windows and targets.

    Returns:
            LstmModel: Trained network with its scaling constants.
    """
    sequences = np.asarray(sequences, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if sequences.ndim != 3 or sequences.shape[0] == 0:
        raise ModelFitError("LSTM needs a non-empty (N, L, D) tensor of windows")
    if sequences.shape[2] != len(feature_names):
        raise ModelFitError("Feature names do not match the window width")

    input_mean = sequences.reshape(-1, sequences.shape[2]).mean(axis=0)
    input_std = sequences.reshape(-1, sequences.shape[2]).std(axis=0)
    input_std = np.where(input_std > 0, input_std, 1.0)
    target_mean = float(targets.mean())
    target_std = float(targets.std()) or 1.0

    def scale_inputs(windows: np.ndarray) -> np.ndarray:
        return (windows - input_mean) / input_std

    train_x = scale_inputs(sequences)
    train_y = (targets - target_mean) / target_std
    if validation is not None and len(validation[1]):
        check_x = scale_inputs(np.asarray(validation[0], dtype=float))
        check_y = (np.asarray(validation[1], dtype=float) - target_mean) / target_std
    else:
        check_x, check_y = train_x, train_y

    rng = np.random.default_rng(params.seed)
    weights = init_weights(sequences.shape[2], params.hidden_size, rng)
    optimizer = AdamOptimizer(params.step_size)

    best_weights, best_score, best_epoch = weights, math.inf, 0
    history: List[float] = []
    for epoch in range(params.epochs):
        order = rng.permutation(train_x.shape[0])
        for start in range(0, len(order), params.batch_size):
            batch = order[start : start + params.batch_size]
            loss, gradients = loss_and_gradients(weights, train_x[batch], train_y[batch])
            if not math.isfinite(loss):
                raise NonFiniteLossError(epoch, {"batch_start": start, "loss": loss})
            gradients, norm = clip_gradients(gradients, params.clip_norm)
            if not math.isfinite(norm):
                raise NonFiniteLossError(epoch, {"batch_start": start, "gradient_norm": norm})
            weights = _from_dict(optimizer.update(weights.as_dict(), gradients))

        predictions, _ = forward(weights, check_x)
        score = float(np.mean((predictions - check_y) ** 2))
        if not math.isfinite(score):
            raise NonFiniteLossError(epoch, {"validation_mse": score})
        history.append(score)
        if score < best_score:
            best_weights, best_score, best_epoch = weights, score, epoch
        elif epoch - best_epoch >= params.patience:
            logger.info("LSTM early stopping at epoch %d, best epoch %d", epoch, best_epoch)
            break

    return LstmModel(
        weights=best_weights,
        params=params,
        feature_names=tuple(feature_names),
        input_mean=input_mean,
        input_std=input_std,
        target_mean=target_mean,
        target_std=target_std,
        best_epoch=best_epoch,
        history=tuple(history),
    )


def predict_lstm(model: LstmModel, sequences: np.ndarray) -> np.ndarray:
    scaled = (np.asarray(sequences, dtype=float) - model.input_mean) / model.input_std
    predictions, _ = forward(model.weights, scaled)
    return model.target_mean + model.target_std * predictions


# PRIVATE FUNCTIONS
def _from_dict(parameters: Dict[str, np.ndarray]) -> LstmWeights:
    return LstmWeights(
        w=parameters["w"],
        u=parameters["u"],
        b=parameters["b"],
        head_w=parameters["head_w"],
        head_b=float(parameters["head_b"]),
    )
