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

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from src.config import (
    GBT_LEARNING_RATE,
    GBT_MAX_DEPTH,
    GBT_MIN_SAMPLES_LEAF,
    GBT_N_ROUNDS,
    GBT_SUBSAMPLE,
    LSTM_BATCH_SIZE,
    LSTM_CLIP_NORM,
    LSTM_EPOCHS,
    LSTM_HIDDEN_SIZE,
    LSTM_PATIENCE,
    LSTM_SEQUENCE_LENGTH,
    LSTM_STEP_SIZE,
)
from src.domain.errors import ConfigValidationError, ModelFitError

HAR_CJ = "HAR-CJ"
HARQ_CJ = "HARQ-CJ(+lev)"

HAR_DESIGN: Dict[str, Tuple[Tuple[str, str], ...]] = {
    HAR_CJ: (("beta_cd", "CV_d"), ("beta_cw", "CV_w"), ("beta_cm", "CV_m"), ("beta_jd", "J_d")),
    HARQ_CJ: (
        ("beta_cd", "CV_d"),
        ("beta_cw", "CV_w"),
        ("beta_cm", "CV_m"),
        ("beta_jd", "J_d"),
        ("beta_q", "RQ_sqrt_RV_d"),
        ("beta_lev", "LEV_RV_d"),
    ),
}


@dataclass(frozen=True)
class HarModel:
    """
    Fitted HAR regression.

    Attributes:
        variant (str): HAR-CJ or HARQ-CJ(+lev).
        coefficients (Dict[str, float]): beta_0 then one slope per design column.
        standard_errors (Dict[str, float]): OLS standard errors, same keys.
        r_squared (float): In-sample R^2.
        residual_variance (float): SSR / (n - p).
        feature_names (Tuple[str, ...]): Fit-time design columns.
        n_observations (int): Rows used by the fit.
    """

    variant: str
    coefficients: Dict[str, float]
    standard_errors: Dict[str, float]
    r_squared: float
    residual_variance: float
    feature_names: Tuple[str, ...]
    n_observations: int

    def __post_init__(self) -> None:
        if len(self.coefficients) != len(HAR_DESIGN[self.variant]) + 1:
            raise ModelFitError(f"{self.variant} expects {len(HAR_DESIGN[self.variant]) + 1} coefficients")


@dataclass(frozen=True)
class GarchModel:
    """
    GARCH(1,1) on demeaned daily returns.

    Attributes:
        omega, alpha, beta (float): Recursion parameters, omega > 0, alpha, beta >= 0, alpha + beta < 1.
        mean (float): Sample mean removed from the returns.
        initial_sigma2 (float): sigma^2_0, the sample variance of the fit returns.
        last_sigma2 (float): One-step-ahead variance after the last fit return.
        log_likelihood (float): Gaussian log-likelihood at the optimum.
        n_observations (int): Returns used by the fit.
    """

    omega: float
    alpha: float
    beta: float
    mean: float
    initial_sigma2: float
    last_sigma2: float
    log_likelihood: float
    n_observations: int

    def __post_init__(self) -> None:
        if not (self.omega > 0 and self.alpha >= 0 and self.beta >= 0 and self.alpha + self.beta < 1):
            raise ModelFitError(
                f"GARCH parameters violate stationarity: omega={self.omega}, alpha={self.alpha}, beta={self.beta}"
            )


@dataclass(frozen=True)
class GbtParams:
    n_rounds: int = GBT_N_ROUNDS
    max_depth: int = GBT_MAX_DEPTH
    learning_rate: float = GBT_LEARNING_RATE
    min_samples_leaf: int = GBT_MIN_SAMPLES_LEAF
    subsample: float = GBT_SUBSAMPLE
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_rounds < 1 or self.max_depth < 0 or self.min_samples_leaf < 1:
            raise ConfigValidationError("GBT needs n_rounds >= 1, max_depth >= 0 and min_samples_leaf >= 1")
        if not 0 < self.learning_rate <= 1 or not 0 < self.subsample <= 1:
            raise ConfigValidationError("GBT learning_rate and subsample must lie in (0, 1]")


@dataclass(frozen=True)
class TreeNode:
    """
    Regression tree node. Leaves carry `value` and feature -1; internal nodes
    send x[feature] <= threshold to the left child.
    """

    feature: int = -1
    threshold: float = 0.0
    value: float = 0.0
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0

    @property
    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth if self.left else 0, self.right.depth if self.right else 0)

    def predict(self, rows: np.ndarray) -> np.ndarray:
        if self.is_leaf:
            return np.full(rows.shape[0], self.value)
        goes_left = rows[:, self.feature] <= self.threshold
        output = np.empty(rows.shape[0])
        output[goes_left] = self.left.predict(rows[goes_left])  # type: ignore[union-attr]
        output[~goes_left] = self.right.predict(rows[~goes_left])  # type: ignore[union-attr]
        return output


@dataclass(frozen=True)
class GbtModel:
    trees: Tuple[TreeNode, ...]
    learning_rate: float
    base_prediction: float
    params: GbtParams
    feature_names: Tuple[str, ...]
    training_losses: Tuple[float, ...] = ()


@dataclass(frozen=True)
class LstmParams:
    hidden_size: int = LSTM_HIDDEN_SIZE
    sequence_length: int = LSTM_SEQUENCE_LENGTH
    batch_size: int = LSTM_BATCH_SIZE
    step_size: float = LSTM_STEP_SIZE
    epochs: int = LSTM_EPOCHS
    clip_norm: float = LSTM_CLIP_NORM
    patience: int = LSTM_PATIENCE
    seed: int = 0

    def __post_init__(self) -> None:
        if min(self.hidden_size, self.sequence_length, self.batch_size, self.epochs, self.patience) < 1:
            raise ConfigValidationError("LSTM sizes, epochs and patience must be at least 1")
        if self.step_size <= 0 or self.clip_norm <= 0:
            raise ConfigValidationError("LSTM step size and clip norm must be positive")


@dataclass(frozen=True, eq=False)
class LstmWeights:
    """
    LSTM cell and head parameters. Gate blocks are stacked in the order
    input, forget, cell candidate, output.

    Attributes:
        w (np.ndarray): Input weights (4H, D).
        u (np.ndarray): Recurrent weights (4H, H).
        b (np.ndarray): Gate biases (4H,).
        head_w (np.ndarray): Linear head weights (H,).
        head_b (float): Linear head bias.
    """

    w: np.ndarray
    u: np.ndarray
    b: np.ndarray
    head_w: np.ndarray
    head_b: float

    @property
    def input_size(self) -> int:
        return self.w.shape[1]

    @property
    def hidden_size(self) -> int:
        return self.u.shape[1]

    def __post_init__(self) -> None:
        hidden = self.u.shape[1]
        if self.w.shape[0] != 4 * hidden or self.u.shape != (4 * hidden, hidden):
            raise ModelFitError("LSTM weight shapes are inconsistent with the hidden size")
        if self.b.shape != (4 * hidden,) or self.head_w.shape != (hidden,):
            raise ModelFitError("LSTM bias or head shapes are inconsistent with the hidden size")

    def as_dict(self) -> Dict[str, np.ndarray]:
        return {"w": self.w, "u": self.u, "b": self.b, "head_w": self.head_w, "head_b": np.array(self.head_b)}


@dataclass(frozen=True, eq=False)
class LstmModel:
    """
    Fitted LSTM with its input and target scaling.

    Attributes:
        weights (LstmWeights): Trained parameters (best validation epoch).
        params (LstmParams): Training parameters.
        feature_names (Tuple[str, ...]): Fit-time per-step input columns.
        input_mean, input_std (np.ndarray): Per-column input scaling.
        target_mean, target_std (float): Target scaling.
        best_epoch (int): Epoch whose parameters were kept.
        history (Tuple[float, ...]): Validation MSE per epoch (scaled target).
    """

    weights: LstmWeights
    params: LstmParams
    feature_names: Tuple[str, ...]
    input_mean: np.ndarray
    input_std: np.ndarray
    target_mean: float
    target_std: float
    best_epoch: int = 0
    history: Tuple[float, ...] = ()


@dataclass(frozen=True, eq=False)
class EnsembleModel:
    """
    Residual-weighted GBT + LSTM ensemble. With one submodel disabled the
    other carries the full weight.

    Attributes:
        gbt (Optional[GbtModel]): Stage-one boosted trees.
        lstm (Optional[LstmModel]): Stage-two network, fed the GBT prediction as an extra column; with
            both submodels it predicts the correction added to the GBT prediction.
        epsilon1 (float): LSTM mean absolute validation residual.
        epsilon2 (float): GBT mean absolute validation residual.
        omega1, omega2 (float): LSTM and GBT weights.
        feature_names (Tuple[str, ...]): Fit-time model features.
    """

    gbt: Optional[GbtModel]
    lstm: Optional[LstmModel]
    epsilon1: float
    epsilon2: float
    omega1: float
    omega2: float
    feature_names: Tuple[str, ...]

    def __post_init__(self) -> None:
        if self.gbt is None and self.lstm is None:
            raise ModelFitError("An ensemble needs at least one submodel")
        if abs(self.omega1 + self.omega2 - 1.0) > 1e-12 or min(self.omega1, self.omega2) < 0:
            raise ModelFitError(f"Ensemble weights must be convex, got ({self.omega1}, {self.omega2})")


@dataclass(frozen=True)
class EnsembleParams:
    gbt: GbtParams = GbtParams()
    lstm: LstmParams = LstmParams()
    use_gbt: bool = True
    use_lstm: bool = True

    def __post_init__(self) -> None:
        if not (self.use_gbt or self.use_lstm):
            raise ConfigValidationError("At least one of the GBT and LSTM submodels must stay enabled")
