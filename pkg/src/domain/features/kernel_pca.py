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
from scipy.linalg import eigh
from scipy.spatial.distance import cdist

from src.config import KPCA_EIGEN_FLOOR, KPCA_VARIANCE_SHARE
from src.domain.errors import DataError
from src.domain.features.feature_data_objects import KernelSpec, KpcaModel

logger = logging.getLogger(__name__)


def gram_matrix(left: np.ndarray, right: np.ndarray, kernel: KernelSpec) -> np.ndarray:
    if kernel.kind == "linear":
        return left @ right.T
    gamma = kernel.gamma if kernel.gamma is not None else 1.0 / left.shape[1]
    return np.exp(-gamma * cdist(left, right, metric="sqeuclidean"))


def center_gram(gram: np.ndarray) -> np.ndarray:
    column_means = gram.mean(axis=0)
    row_means = gram.mean(axis=1)
    return gram - column_means[None, :] - row_means[:, None] + gram.mean()


def kpca_fit(
    rows: np.ndarray,
    kernel: KernelSpec = KernelSpec(),
    n_components: Optional[int] = None,
    variance_share: float = KPCA_VARIANCE_SHARE,
) -> KpcaModel:
    """
    Kernel PCA on the double-centered Gram matrix of the training rows.

    Args:
            rows (np.ndarray): Training feature vectors (N, D).
            kernel (KernelSpec): Kernel; the RBF width is resolved to 1/D when unset.
            n_components (Optional[int]): Components to keep. When None, the smallest
                count reaching `variance_share` of the centered kernel variance.
            variance_share (float): Target share used when n_components is None.

    Returns:
            KpcaModel: Fitted model with unit-norm (feature space) expansion coefficients.
    """
    training_rows = np.asarray(rows, dtype=float)
    if training_rows.ndim != 2 or training_rows.shape[0] < 2:
        raise DataError("Kernel PCA needs at least 2 training rows")
    if not np.all(np.isfinite(training_rows)):
        raise DataError("Kernel PCA training rows must be finite")
    if n_components is not None and n_components < 0:
        raise DataError(f"Component count must not be negative, got {n_components}")

    if kernel.kind == "rbf" and kernel.gamma is None:
        kernel = KernelSpec(kind="rbf", gamma=1.0 / training_rows.shape[1])

    gram = gram_matrix(training_rows, training_rows, kernel)
    centered = center_gram(gram)
    centered = (centered + centered.T) / 2

    eigenvalues, eigenvectors = eigh(centered)
    eigenvalues = eigenvalues[::-1]
    eigenvectors = eigenvectors[:, ::-1]
    if eigenvalues[-1] < -1e-8 * max(eigenvalues[0], 1.0):
        logger.warning("Centered Gram matrix has a negative eigenvalue %.3e, clamped to 0", eigenvalues[-1])
    eigenvalues = np.where(eigenvalues < 0, 0.0, eigenvalues)

    positive = int(np.sum(eigenvalues > KPCA_EIGEN_FLOOR))
    total = float(eigenvalues.sum())
    if n_components is None:
        n_components = _components_for_share(eigenvalues[:positive], total, variance_share)
    elif n_components > positive:
        logger.warning("Requested %d components but only %d positive eigenvalues, truncated", n_components, positive)
        n_components = positive

    kept_values = eigenvalues[:n_components]
    kept_vectors = _fix_signs(eigenvectors[:, :n_components])
    coefficients = kept_vectors / np.sqrt(kept_values)[None, :] if n_components else kept_vectors

    return KpcaModel(
        training_rows=training_rows,
        kernel=kernel,
        eigenvalues=kept_values,
        coefficients=coefficients,
        n_components=n_components,
        gram_column_means=gram.mean(axis=0),
        gram_mean=float(gram.mean()),
        explained_share=float(kept_values.sum() / total) if total > 0 else 0.0,
        training_projections=centered @ coefficients,
    )


def kpca_transform(model: KpcaModel, row: np.ndarray) -> np.ndarray:
    row = np.asarray(row, dtype=float)
    if row.ndim != 1:
        raise DataError("kpca_transform expects a single feature vector")
    return kpca_transform_rows(model, row[None, :])[0]


def kpca_transform_rows(model: KpcaModel, rows: np.ndarray) -> np.ndarray:
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != model.training_rows.shape[1]:
        raise DataError(
            f"Row dimension {rows.shape[-1]} does not match the {model.training_rows.shape[1]} training columns"
        )
    if model.n_components == 0:
        return np.empty((rows.shape[0], 0))
    kernel_values = gram_matrix(rows, model.training_rows, model.kernel)
    centered = (
        kernel_values
        - kernel_values.mean(axis=1, keepdims=True)
        - model.gram_column_means[None, :]
        + model.gram_mean
    )
    return centered @ model.coefficients


# PRIVATE FUNCTIONS
def _components_for_share(eigenvalues: np.ndarray, total: float, variance_share: float) -> int:
    if total <= 0 or eigenvalues.size == 0:
        return 0
    cumulative = np.cumsum(eigenvalues) / total
    return int(min(np.searchsorted(cumulative, variance_share - 1e-12) + 1, eigenvalues.size))


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # Largest-magnitude entry of each eigenvector is made positive
    if vectors.shape[1] == 0:
        return vectors
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs[None, :]
