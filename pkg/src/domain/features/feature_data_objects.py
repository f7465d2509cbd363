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

from dataclasses import dataclass, field
from datetime import date
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from src.config import KPCA_VARIANCE_SHARE, SFS_BUDGET, SFS_RIDGE_LAMBDA
from src.domain.errors import ConfigValidationError, DataError, SchemaMismatchError

# Feature groups that ablation toggles can drop
WEATHER_GROUP = "weather"
SUPPLY_DEMAND_GROUP = "supply_demand"
PRICE_FLUCTUATIONS_GROUP = "price_fluctuations"
REGIONAL_GROUP = "regional"
RATING_GROUP = "rating"
HAR_RV_GROUP = "har_rv"
HARQ_GROUP = "harq"
REDUCED_GROUP = "reduced"

EXOGENOUS_COLUMNS: Dict[str, Tuple[str, str]] = {
    "air_temp_c": ("degC", WEATHER_GROUP),
    "wind_speed_ms": ("m/s", WEATHER_GROUP),
    "rel_humidity_pct": ("%", WEATHER_GROUP),
    "mslp_hpa": ("hPa", WEATHER_GROUP),
    "supply_mw": ("MW", SUPPLY_DEMAND_GROUP),
    "demand_mw": ("MW", SUPPLY_DEMAND_GROUP),
    "retail_price": ("$/MWh", SUPPLY_DEMAND_GROUP),
    "price_vic": ("$/MWh", REGIONAL_GROUP),
    "price_qld": ("$/MWh", REGIONAL_GROUP),
    "price_sa": ("$/MWh", REGIONAL_GROUP),
    "price_tas": ("$/MWh", REGIONAL_GROUP),
    "weather_rating": ("1-5", RATING_GROUP),
}


def _frozen(values: Sequence[float]) -> np.ndarray:
    array = np.array(values, dtype=float, copy=True)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class FeatureColumn:
    """
    Named day-indexed feature vector. NaN marks a value that is missing for
    that day.
    """

    name: str
    values: np.ndarray
    unit: str
    group: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _frozen(self.values))


@dataclass(frozen=True)
class TargetSpec:
    """
    Forecast target: next-day realized variance in levels, logs or square roots.
    """

    kind: str = "level"

    def __post_init__(self) -> None:
        if self.kind not in ("level", "ln", "sqrt"):
            raise ConfigValidationError(f"Unknown target transform '{self.kind}', expected level, ln or sqrt")

    @property
    def name(self) -> str:
        return {"level": "RV_next", "ln": "lnRV_next", "sqrt": "sqrtRV_next"}[self.kind]

    def apply(self, variance: np.ndarray) -> np.ndarray:
        variance = np.asarray(variance, dtype=float)
        if self.kind == "level":
            return variance.copy()
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "ln":
                return np.where(variance > 0, np.log(np.where(variance > 0, variance, 1.0)), np.nan)
            return np.where(variance >= 0, np.sqrt(np.abs(variance)), np.nan)


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """
    Day-indexed regressors aligned with the forecast target of the next day.

    Attributes:
        days (Tuple[date, ...]): Row dates, strictly increasing.
        columns (Tuple[FeatureColumn, ...]): Ordered feature columns with unique names.
        target (np.ndarray): Target of each row, the transform of the next day's RV.
        target_name (str): Label of the target.
        mask (np.ndarray): True where the row is usable (target and required columns present).
        model_features (Tuple[str, ...]): Columns the hybrid ensemble consumes. Other
            columns are kept for the econometric baselines.
    """

    days: Tuple[date, ...]
    columns: Tuple[FeatureColumn, ...]
    target: np.ndarray
    target_name: str
    mask: np.ndarray
    model_features: Tuple[str, ...] = ()
    _positions: Dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "target", _frozen(self.target))
        mask = np.array(self.mask, dtype=bool, copy=True)
        mask.flags.writeable = False
        object.__setattr__(self, "mask", mask)

        names = [column.name for column in self.columns]
        if len(set(names)) != len(names):
            duplicates = sorted({name for name in names if names.count(name) > 1})
            raise DataError(f"Duplicate feature column names: {', '.join(duplicates)}")
        for column in self.columns:
            if len(column.values) != len(self.days):
                raise DataError(f"Column '{column.name}' has {len(column.values)} values for {len(self.days)} days")
        if len(self.target) != len(self.days) or len(self.mask) != len(self.days):
            raise DataError("Target and mask must have one entry per day")
        unknown = tuple(name for name in self.model_features if name not in names)
        if unknown:
            raise SchemaMismatchError(unknown, "Model features are not columns of the matrix")

        object.__setattr__(self, "_positions", {name: position for position, name in enumerate(names)})

    @property
    def column_names(self) -> Tuple[str, ...]:
        return tuple(column.name for column in self.columns)

    def column(self, name: str) -> FeatureColumn:
        position = self._positions.get(name)
        if position is None:
            raise SchemaMismatchError((name,))
        return self.columns[position]

    def values(self, names: Sequence[str], rows: Optional[np.ndarray] = None) -> np.ndarray:
        """
        Args:
                names (Sequence[str]): Columns to stack, in order.
                rows (Optional[np.ndarray]): Row indices, all rows when None.

        Returns:
                np.ndarray: Array of shape (rows, len(names)).
        """
        missing = tuple(name for name in names if name not in self._positions)
        if missing:
            raise SchemaMismatchError(missing)
        if names:
            stacked = np.column_stack([self.columns[self._positions[name]].values for name in names])
        else:
            stacked = np.empty((len(self.days), 0))
        return stacked if rows is None else stacked[rows]

    def usable_rows(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def with_columns(
        self, columns: Sequence[FeatureColumn], model_features: Tuple[str, ...], mask: Optional[np.ndarray] = None
    ) -> "FeatureMatrix":
        return FeatureMatrix(
            days=self.days,
            columns=tuple(columns),
            target=self.target,
            target_name=self.target_name,
            mask=self.mask if mask is None else mask,
            model_features=model_features,
        )


@dataclass(frozen=True, eq=False)
class ExogenousTable:
    """
    Daily exogenous factors. Columns follow EXOGENOUS_COLUMNS for their unit
    and ablation group.
    """

    days: Tuple[date, ...]
    columns: Dict[str, np.ndarray]

    def __post_init__(self) -> None:
        if len(set(self.days)) != len(self.days):
            raise DataError("Exogenous table holds duplicate days")
        for name, values in self.columns.items():
            if name not in EXOGENOUS_COLUMNS:
                raise DataError(f"Unknown exogenous column '{name}'")
            if len(values) != len(self.days):
                raise DataError(f"Exogenous column '{name}' has {len(values)} values for {len(self.days)} days")

    def with_column(self, name: str, values: np.ndarray) -> "ExogenousTable":
        columns = dict(self.columns)
        columns[name] = np.asarray(values, dtype=float)
        return ExogenousTable(days=self.days, columns=columns)


@dataclass(frozen=True)
class StandardizationConstants:
    means: Dict[str, float]
    stds: Dict[str, float]


@dataclass(frozen=True)
class SelectionResult:
    selected: Tuple[str, ...]
    scores: Tuple[float, ...]
    budget: int
    baseline_score: float


@dataclass(frozen=True)
class KernelSpec:
    """
    Kernel of the reduction step. RBF uses exp(-gamma * ||x - y||^2) with gamma
    defaulting to 1 / number of columns.
    """

    kind: str = "rbf"
    gamma: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind not in ("rbf", "linear"):
            raise ConfigValidationError(f"Unknown kernel '{self.kind}', expected rbf or linear")
        if self.gamma is not None and self.gamma <= 0:
            raise ConfigValidationError(f"Kernel width must be positive, got {self.gamma}")


@dataclass(frozen=True, eq=False)
class KpcaModel:
    """
    Fitted kernel principal components.

    Attributes:
        training_rows (np.ndarray): Stored training feature vectors (N, D).
        kernel (KernelSpec): Kernel kind and resolved width.
        eigenvalues (np.ndarray): Kept eigenvalues of the centered Gram matrix, descending.
        coefficients (np.ndarray): Expansion weights (N, n_components), unit norm in feature space.
        n_components (int): Kept component count.
        gram_column_means (np.ndarray): Column means of the uncentered training Gram matrix.
        gram_mean (float): Grand mean of the uncentered training Gram matrix.
        explained_share (float): Share of centered kernel variance carried by the kept components.
        training_projections (np.ndarray): Fit-time projections of the training rows.
    """

    training_rows: np.ndarray
    kernel: KernelSpec
    eigenvalues: np.ndarray
    coefficients: np.ndarray
    n_components: int
    gram_column_means: np.ndarray
    gram_mean: float
    explained_share: float
    training_projections: np.ndarray


@dataclass(frozen=True)
class FeatureSettings:
    """
    Feature construction and reduction settings.

    Attributes:
        target (str): Target transform, "level", "ln" or "sqrt".
        sfs_budget (int): Maximum number of selected features.
        ridge_lambda (float): Ridge penalty of the selection proxy.
        kernel (KernelSpec): Kernel of the reduction step.
        n_components (Optional[int]): Fixed component count, or None for the variance share rule.
        variance_share (float): Kernel variance share kept when n_components is None.
        kpca_mode (str): "replace" swaps the selected columns for components, "augment" keeps both.
        use_kpca (bool): When False the ensemble consumes the selected columns directly.
    """

    target: str = "level"
    sfs_budget: int = SFS_BUDGET
    ridge_lambda: float = SFS_RIDGE_LAMBDA
    kernel: KernelSpec = KernelSpec()
    n_components: Optional[int] = None
    variance_share: float = KPCA_VARIANCE_SHARE
    kpca_mode: str = "replace"
    use_kpca: bool = True

    def __post_init__(self) -> None:
        if self.kpca_mode not in ("replace", "augment"):
            raise ConfigValidationError(f"Unknown kpca_mode '{self.kpca_mode}', expected replace or augment")
        if self.sfs_budget < 1:
            raise ConfigValidationError(f"SFS budget must be at least 1, got {self.sfs_budget}")
        if not 0 < self.variance_share <= 1:
            raise ConfigValidationError(f"KPCA variance share must lie in (0, 1], got {self.variance_share}")


@dataclass(frozen=True, eq=False)
class ReductionReport:
    """
    Provenance of the model feature set, persisted next to the feature matrix.
    """

    standardization: StandardizationConstants
    selection: Optional[SelectionResult]
    kpca: Optional[KpcaModel]
