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
from typing import Dict, Optional, Tuple

import numpy as np

from src.domain.errors import DataError


def _frozen(array: np.ndarray) -> np.ndarray:
    frozen = np.array(array, dtype=float, copy=True)
    frozen.flags.writeable = False
    return frozen


def _check_days(days: Tuple[date, ...]) -> None:
    for previous, current in zip(days, days[1:]):
        if current <= previous:
            raise DataError(f"Days must be strictly increasing, got {previous} then {current}")


@dataclass(frozen=True, eq=False)
class IntradayPriceSeries:
    """
    Calendar-aligned panel of intraday spot prices for one market region.

    Attributes:
        days (Tuple[date, ...]): Trading days, strictly increasing.
        slots_per_day (int): Number of intraday intervals M (48 half-hours).
        prices (np.ndarray): Day-by-slot grid of spot prices in $/MWh, shape
            (len(days), slots_per_day). Uncleaned series may hold non-positive
            or NaN (padded) cells.
        region (str): Market region label, e.g. "NSW".
        demand (Optional[np.ndarray]): Optional day-by-slot demand (MW), passed through.
        supply (Optional[np.ndarray]): Optional day-by-slot supply (MW), passed through.
    """

    days: Tuple[date, ...]
    slots_per_day: int
    prices: np.ndarray
    region: str
    demand: Optional[np.ndarray] = None
    supply: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        _check_days(self.days)
        object.__setattr__(self, "prices", _frozen(self.prices))
        if self.prices.shape != (len(self.days), self.slots_per_day):
            raise DataError(
                f"Price grid shape {self.prices.shape} does not match {len(self.days)} days x {self.slots_per_day} slots"
            )
        for name in ("demand", "supply"):
            values = getattr(self, name)
            if values is not None:
                object.__setattr__(self, name, _frozen(values))

    @property
    def is_clean(self) -> bool:
        return bool(np.all(self.prices > 0))

    def with_prices(self, prices: np.ndarray) -> "IntradayPriceSeries":
        return IntradayPriceSeries(self.days, self.slots_per_day, prices, self.region, self.demand, self.supply)


@dataclass(frozen=True)
class ValidationSummary:
    """
    Findings of ingestion that do not prevent building the series.

    Attributes:
        nonpositive_positions (Tuple[Tuple[date, int], ...]): (day, slot) cells holding a price <= 0.
        padded_positions (Tuple[Tuple[date, int], ...]): (day, slot) cells that were missing and padded.
        truncated_days (Tuple[date, ...]): Incomplete trailing days dropped on request.
    """

    nonpositive_positions: Tuple[Tuple[date, int], ...] = ()
    padded_positions: Tuple[Tuple[date, int], ...] = ()
    truncated_days: Tuple[date, ...] = ()

    @property
    def nonpositive_count(self) -> int:
        return len(self.nonpositive_positions)


@dataclass(frozen=True)
class CleaningReport:
    replaced_positions: Tuple[Tuple[date, int], ...]
    method: str
    replaced_count: int = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "replaced_count", len(self.replaced_positions))

    def to_document(self) -> Dict:
        return {
            "replaced_count": self.replaced_count,
            "replaced_positions": [[day.isoformat(), slot] for day, slot in self.replaced_positions],
            "method": self.method,
        }


@dataclass(frozen=True, eq=False)
class ReturnPanel:
    """
    Intraday price differences, one row per day.

    The first sample day has no previous close, so its slot 0 holds NaN and
    it carries M-1 usable returns. Every other day carries M returns.
    """

    days: Tuple[date, ...]
    slots_per_day: int
    returns: np.ndarray
    demeaned: bool = False

    def __post_init__(self) -> None:
        _check_days(self.days)
        object.__setattr__(self, "returns", _frozen(self.returns))
        if self.returns.shape != (len(self.days), self.slots_per_day):
            raise DataError(f"Return grid shape {self.returns.shape} does not match the day/slot layout")

    def day_returns(self, index: int) -> np.ndarray:
        row = self.returns[index]
        return row[np.isfinite(row)]


@dataclass(frozen=True)
class SeasonalProfile:
    """
    Median intraday return per (month, day-of-week, slot) cell, estimated on a
    date window only. Day-of-week follows date.weekday() (Monday = 0).
    """

    medians: Dict[Tuple[int, int, int], float]
    estimation_window: Tuple[date, date]
    slots_per_day: int

    def median_for(self, day: date, slot: int) -> Optional[float]:
        return self.medians.get((day.month, day.weekday(), slot))
