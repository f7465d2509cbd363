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
from typing import Dict, Optional

from scipy.stats import norm

from src.config import JUMP_ALPHA
from src.domain.errors import ConfigValidationError

MEASURE_COLUMNS = (
    "date",
    "m",
    "rv",
    "bpv",
    "tpq",
    "rq",
    "z",
    "jump",
    "cv",
    "ln_rv",
    "ln_j1p",
    "ln_cv",
    "sqrt_rv",
    "sqrt_j",
    "sqrt_cv",
)


@dataclass(frozen=True)
class JumpTestConfig:
    """
    Significance of the daily jump test. The threshold is the upper-alpha
    quantile of the standard normal distribution.
    """

    alpha: float = JUMP_ALPHA
    threshold: float = field(init=False)

    def __post_init__(self) -> None:
        if not 0 < self.alpha < 1:
            raise ConfigValidationError(f"Jump test alpha must lie in (0, 1), got {self.alpha}")
        object.__setattr__(self, "threshold", float(norm.ppf(1 - self.alpha)))


@dataclass(frozen=True)
class DailyRealizedMeasures:
    """
    Realized estimators of one trading day, in ($/MWh)^2 for the variance
    measures and ($/MWh)^4 for the quarticities.

    Attributes:
        day (date): Trading day.
        m (int): Number of intraday returns used.
        rv (float): Realized variance.
        bpv (float): Bipower variation.
        tpq (float): Tri-power quarticity.
        rq (float): Realized quarticity.
        z (Optional[float]): Jump statistic, None when undefined (RV or BPV is zero).
        jump (float): Jump component J, never negative.
        cv (float): Continuous component, RV - J.
        ln_rv (Optional[float]): None when RV is zero.
        ln_j1p (Optional[float]): ln(J + 1), always defined once transformed.
        ln_cv (Optional[float]): None when CV is zero.
        sqrt_rv, sqrt_j, sqrt_cv (Optional[float]): Square roots.
    """

    day: date
    m: int
    rv: float
    bpv: float
    tpq: float
    rq: float
    z: Optional[float]
    jump: float
    cv: float
    ln_rv: Optional[float] = None
    ln_j1p: Optional[float] = None
    ln_cv: Optional[float] = None
    sqrt_rv: Optional[float] = None
    sqrt_j: Optional[float] = None
    sqrt_cv: Optional[float] = None

    def to_row(self) -> Dict[str, object]:
        return {column: self.day.isoformat() if column == "date" else getattr(self, column) for column in MEASURE_COLUMNS}


@dataclass(frozen=True)
class DescriptiveStats:
    """
    Summary row of a price or estimator column. Skewness and (Pearson)
    kurtosis are NaN for constant inputs.
    """

    count: int
    mean: float
    std: float
    skewness: float
    kurtosis: float
    minimum: float
    quartile_1: float
    median: float
    quartile_3: float
    maximum: float
