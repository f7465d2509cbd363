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
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.domain.errors import ModelFitError
from src.domain.forecasting.forecasting_data_objects import GbtModel, GbtParams, TreeNode

logger = logging.getLogger(__name__)

GBT_MIN_ROWS = 50
# Smallest SSE reduction accepted for a split
MIN_SPLIT_GAIN = 1e-12


def fit_gbt(x: np.ndarray, y: np.ndarray, params: GbtParams, feature_names: Sequence[str]) -> GbtModel:
    """
    Squared-loss gradient boosting. Each round grows a depth-limited
    regression tree on the current residuals of a row subsample (drawn without
    replacement from a seeded generator) and adds it with shrinkage.

    Args:
            x (np.ndarray): Training features (N, D).
            y (np.ndarray): Training targets (N,).
            params (GbtParams): Boosting parameters.
            feature_names (Sequence[str]): Fit-time column names.

    Returns:
            GbtModel: Trees, base prediction and the full-sample training MSE after each round.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or x.shape[1] == 0:
        raise ModelFitError("Gradient boosting needs a non-empty feature set")
    if x.shape[0] < GBT_MIN_ROWS:
        raise ModelFitError(f"Gradient boosting needs at least {GBT_MIN_ROWS} rows, got {x.shape[0]}")
    if len(feature_names) != x.shape[1]:
        raise ModelFitError("Feature names do not match the feature columns")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ModelFitError("Gradient boosting inputs must be finite")

    rng = np.random.default_rng(params.seed)
    n_rows = x.shape[0]
    sample_size = max(1, int(np.floor(params.subsample * n_rows)))

    base_prediction = float(np.mean(y))
    predictions = np.full(n_rows, base_prediction)
    trees: List[TreeNode] = []
    losses: List[float] = []
    for _ in range(params.n_rounds):
        residuals = y - predictions
        if sample_size < n_rows:
            sample = np.sort(rng.choice(n_rows, size=sample_size, replace=False))
        else:
            sample = np.arange(n_rows)
        tree = _grow(x[sample], residuals[sample], 0, params)
        trees.append(tree)
        predictions = predictions + params.learning_rate * tree.predict(x)
        losses.append(float(np.mean((y - predictions) ** 2)))

    logger.info("GBT fitted %d trees on %d rows, final training MSE %.6g", len(trees), n_rows, losses[-1])
    return GbtModel(
        trees=tuple(trees),
        learning_rate=params.learning_rate,
        base_prediction=base_prediction,
        params=params,
        feature_names=tuple(feature_names),
        training_losses=tuple(losses),
    )


def predict_gbt(model: GbtModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    output = np.full(x.shape[0], model.base_prediction)
    for tree in model.trees:
        output += model.learning_rate * tree.predict(x)
    return output


# PRIVATE FUNCTIONS
def _grow(x: np.ndarray, residuals: np.ndarray, depth: int, params: GbtParams) -> TreeNode:
    leaf = TreeNode(value=float(np.mean(residuals)))
    if depth >= params.max_depth or x.shape[0] < 2 * params.min_samples_leaf:
        return leaf

    split = _best_split(x, residuals, params.min_samples_leaf)
    if split is None:
        return leaf

    feature, threshold = split
    goes_left = x[:, feature] <= threshold
    return TreeNode(
        feature=feature,
        threshold=threshold,
        value=leaf.value,
        left=_grow(x[goes_left], residuals[goes_left], depth + 1, params),
        right=_grow(x[~goes_left], residuals[~goes_left], depth + 1, params),
    )


def _best_split(x: np.ndarray, residuals: np.ndarray, min_samples_leaf: int) -> Optional[Tuple[int, float]]:
    """
    Exhaustive search of the split maximizing the SSE reduction. Features are
    scanned by increasing index and thresholds by increasing value; only a
    strictly larger gain replaces the incumbent.
    """
    n_rows = x.shape[0]
    total = residuals.sum()
    parent_score = total**2 / n_rows
    best_gain = MIN_SPLIT_GAIN
    best: Optional[Tuple[int, float]] = None

    left_sizes = np.arange(1, n_rows)
    admissible = (left_sizes >= min_samples_leaf) & (n_rows - left_sizes >= min_samples_leaf)
    for feature in range(x.shape[1]):
        order = np.argsort(x[:, feature], kind="stable")
        values = x[order, feature]
        left_sums = np.cumsum(residuals[order])[:-1]
        gains = left_sums**2 / left_sizes + (total - left_sums) ** 2 / (n_rows - left_sizes) - parent_score
        valid = admissible & (values[1:] > values[:-1])
        if not valid.any():
            continue
        gains = np.where(valid, gains, -np.inf)
        position = int(np.argmax(gains))
        if gains[position] > best_gain:
            best_gain = float(gains[position])
            best = (feature, float((values[position] + values[position + 1]) / 2))
    return best
