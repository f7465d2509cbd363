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
from datetime import date
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import gamma
from scipy.stats import kurtosis, skew

from src.domain.errors import DataError
from src.domain.market.market_data_objects import ReturnPanel
from src.domain.realized.realized_data_objects import DailyRealizedMeasures, DescriptiveStats, JumpTestConfig

logger = logging.getLogger(__name__)

MU_FOUR_THIRDS = 2 ** (2 / 3) * gamma(7 / 6) / gamma(1 / 2)
# Asymptotic variance constant of the ratio jump statistic
THETA = (math.pi / 2) ** 2 + math.pi - 5


def realized_variance(returns: np.ndarray) -> float:
    if len(returns) == 0:
        raise DataError("Realized variance needs at least one return")
    return float(np.sum(np.square(returns)))


def bipower_variation(returns: np.ndarray) -> float:
    m = len(returns)
    if m < 2:
        raise DataError(f"Bipower variation needs at least 2 returns, got {m}")
    absolute = np.abs(returns)
    return float((math.pi / 2) * (m / (m - 1)) * np.sum(absolute[1:] * absolute[:-1]))


def tripower_quarticity(returns: np.ndarray) -> float:
    m = len(returns)
    if m < 3:
        raise DataError(f"Tri-power quarticity needs at least 3 returns, got {m}")
    powered = np.abs(returns) ** (4 / 3)
    products = powered[2:] * powered[1:-1] * powered[:-2]
    return float(m * MU_FOUR_THIRDS**-3 * (m / (m - 2)) * np.sum(products))


def realized_quarticity(returns: np.ndarray) -> float:
    m = len(returns)
    if m == 0:
        raise DataError("Realized quarticity needs at least one return")
    return float(m / 3 * np.sum(np.power(returns, 4)))


def jump_statistic(rv: float, bpv: float, tpq: float, m: int) -> Optional[float]:
    """
    Studentized relative jump measure (RV - BPV) / RV.

    The scale uses the constant (pi/2)^2 + pi - 5 and max(1, TPQ / BPV^2);
    other printed forms of this denominator are not dimensionally consistent.

    Returns:
            Optional[float]: None when RV or BPV is zero, the day is then left out of jump testing.
    """
    if m < 3:
        raise DataError(f"Jump statistic needs at least 3 returns, got {m}")
    if rv <= 0 or bpv <= 0:
        return None
    scale = math.sqrt(THETA * (1 / m) * max(1.0, tpq / bpv**2))
    return ((rv - bpv) / rv) / scale


def decompose(rv: float, bpv: float, z: Optional[float], cfg: JumpTestConfig) -> Tuple[float, float]:
    if z is None or z <= cfg.threshold:
        return 0.0, rv
    jump = max(rv - bpv, 0.0)
    return jump, rv - jump


def transform(measures: DailyRealizedMeasures) -> DailyRealizedMeasures:
    return DailyRealizedMeasures(
        day=measures.day,
        m=measures.m,
        rv=measures.rv,
        bpv=measures.bpv,
        tpq=measures.tpq,
        rq=measures.rq,
        z=measures.z,
        jump=measures.jump,
        cv=measures.cv,
        ln_rv=math.log(measures.rv) if measures.rv > 0 else None,
        ln_j1p=math.log1p(measures.jump),
        ln_cv=math.log(measures.cv) if measures.cv > 0 else None,
        sqrt_rv=math.sqrt(measures.rv),
        sqrt_j=math.sqrt(measures.jump),
        sqrt_cv=math.sqrt(measures.cv),
    )


def daily_measures(day: date, returns: np.ndarray, cfg: JumpTestConfig) -> DailyRealizedMeasures:
    m = len(returns)
    rv = realized_variance(returns)
    bpv = bipower_variation(returns)
    tpq = tripower_quarticity(returns)
    rq = realized_quarticity(returns)
    z = jump_statistic(rv, bpv, tpq, m)
    jump, cv = decompose(rv, bpv, z, cfg)
    return transform(DailyRealizedMeasures(day=day, m=m, rv=rv, bpv=bpv, tpq=tpq, rq=rq, z=z, jump=jump, cv=cv))


def compute_measures(panel: ReturnPanel, cfg: JumpTestConfig) -> Tuple[DailyRealizedMeasures, ...]:
    measures = tuple(daily_measures(day, panel.day_returns(index), cfg) for index, day in enumerate(panel.days))
    jump_days = sum(1 for measure in measures if measure.jump > 0)
    undefined = sum(1 for measure in measures if measure.z is None)
    logger.info(
        "Computed measures for %d days, %d jump days, %d undefined statistics", len(measures), jump_days, undefined
    )
    return measures


def describe(values: Sequence[float]) -> DescriptiveStats:
    array = np.asarray([value for value in values if value is not None], dtype=float)
    array = array[np.isfinite(array)]
    if array.size == 0:
        raise DataError("Cannot describe an empty column")

    std = float(np.std(array, ddof=1)) if array.size > 1 else 0.0
    degenerate = std == 0.0
    first, median, third = np.percentile(array, [25, 50, 75])
    return DescriptiveStats(
        count=int(array.size),
        mean=float(np.mean(array)),
        std=std,
        skewness=math.nan if degenerate else float(skew(array)),
        kurtosis=math.nan if degenerate else float(kurtosis(array, fisher=False)),
        minimum=float(np.min(array)),
        quartile_1=float(first),
        median=float(median),
        quartile_3=float(third),
        maximum=float(np.max(array)),
    )
