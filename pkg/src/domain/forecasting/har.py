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
from typing import Optional

import numpy as np
from scipy.linalg import solve_triangular

from src.domain.errors import ModelFitError, RankDeficientError
from src.domain.features.feature_data_objects import FeatureMatrix
from src.domain.forecasting.forecasting_data_objects import HAR_CJ, HAR_DESIGN, HarModel

logger = logging.getLogger(__name__)

INTERCEPT = "beta_0"
# |R_jj| below this share of the largest diagonal entry marks a dependent column
RANK_TOLERANCE = 1e-10


def fit_har(matrix: FeatureMatrix, variant: str = HAR_CJ, rows: Optional[np.ndarray] = None) -> HarModel:
    """
    Ordinary least squares of the target on the variant's HAR design, solved
    through a thin QR decomposition.

    Args:
            matrix (FeatureMatrix): Matrix holding the HAR lag columns.
            variant (str): HAR-CJ or HARQ-CJ(+lev).
            rows (Optional[np.ndarray]): Fit rows, every usable row when None.

    Returns:
            HarModel: Coefficients, standard errors and fit diagnostics.
    """
    if variant not in HAR_DESIGN:
        raise ModelFitError(f"Unknown HAR variant '{variant}', expected one of {', '.join(HAR_DESIGN)}")
    labels = (INTERCEPT,) + tuple(label for label, _ in HAR_DESIGN[variant])
    names = tuple(column for _, column in HAR_DESIGN[variant])

    rows = matrix.usable_rows() if rows is None else np.asarray(rows, dtype=int)
    if len(rows) < 5 * len(labels):
        raise ModelFitError(f"{variant} needs at least {5 * len(labels)} rows, got {len(rows)}")

    design = np.column_stack([np.ones(len(rows)), matrix.values(names, rows)])
    target = matrix.target[rows]
    if not (np.all(np.isfinite(design)) and np.all(np.isfinite(target))):
        raise ModelFitError(f"{variant} fit rows hold missing values")

    q, r = np.linalg.qr(design)
    diagonal = np.abs(np.diag(r))
    dependent = diagonal <= RANK_TOLERANCE * diagonal.max()
    if dependent.any():
        columns = ("intercept",) + names
        raise RankDeficientError(tuple(columns[index] for index in np.flatnonzero(dependent)))

    coefficients = solve_triangular(r, q.T @ target)
    residuals = target - design @ coefficients
    ssr = float(residuals @ residuals)
    degrees_of_freedom = len(rows) - len(labels)
    residual_variance = ssr / degrees_of_freedom
    r_inverse = solve_triangular(r, np.eye(len(labels)))
    standard_errors = np.sqrt(residual_variance * np.sum(r_inverse**2, axis=1))

    centered = target - target.mean()
    sst = float(centered @ centered)
    r_squared = 1.0 - ssr / sst if sst > 0 else float(ssr <= 1e-20)

    logger.info("%s fitted on %d rows, R2=%.4f", variant, len(rows), r_squared)
    return HarModel(
        variant=variant,
        coefficients={label: float(value) for label, value in zip(labels, coefficients)},
        standard_errors={label: float(value) for label, value in zip(labels, standard_errors)},
        r_squared=float(r_squared),
        residual_variance=float(residual_variance),
        feature_names=names,
        n_observations=len(rows),
    )


def predict_har(model: HarModel, matrix: FeatureMatrix, rows: np.ndarray) -> np.ndarray:
    slopes = np.array([model.coefficients[label] for label, _ in HAR_DESIGN[model.variant]])
    return model.coefficients[INTERCEPT] + matrix.values(model.feature_names, rows) @ slopes
