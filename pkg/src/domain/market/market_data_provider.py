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
from datetime import date
from typing import Dict, List, Tuple

import numpy as np

from src.domain.errors import DataError, UnrecoverableDataError
from src.domain.market.market_data_objects import CleaningReport, IntradayPriceSeries, ReturnPanel, SeasonalProfile

logger = logging.getLogger(__name__)

CLEANING_METHOD = "nearest-positive (earlier on tie)"


def clean_nonpositive(series: IntradayPriceSeries) -> Tuple[IntradayPriceSeries, CleaningReport]:
    """
    Replace every non-positive (or padded NaN) price by the nearest-in-time
    positive price of the original series. Equidistant neighbours resolve
    toward the earlier observation.

    Args:
            series (IntradayPriceSeries): Series as ingested.

    Returns:
            Tuple[IntradayPriceSeries, CleaningReport]: Strictly positive series and the audit trail.
    """
    flat = series.prices.reshape(-1)
    valid = flat > 0
    if not valid.any():
        raise UnrecoverableDataError("Every price of the series is non-positive, nothing to interpolate from")

    if valid.all():
        return series, CleaningReport(replaced_positions=(), method=CLEANING_METHOD)

    positions = np.arange(flat.size)
    previous_valid = np.maximum.accumulate(np.where(valid, positions, -1))
    next_valid = np.minimum.accumulate(np.where(valid, positions, flat.size)[::-1])[::-1]

    distance_to_previous = np.where(previous_valid >= 0, positions - previous_valid, np.iinfo(np.int64).max)
    distance_to_next = np.where(next_valid < flat.size, next_valid - positions, np.iinfo(np.int64).max)
    source = np.where(distance_to_previous <= distance_to_next, previous_valid, next_valid)

    cleaned = np.where(valid, flat, flat[np.clip(source, 0, flat.size - 1)])

    invalid_positions = np.flatnonzero(~valid)
    replaced = tuple(
        (series.days[int(position) // series.slots_per_day], int(position) % series.slots_per_day)
        for position in invalid_positions
    )
    logger.info("Replaced %d non-positive prices", len(replaced))

    cleaned_series = series.with_prices(cleaned.reshape(series.prices.shape))
    return cleaned_series, CleaningReport(replaced_positions=replaced, method=CLEANING_METHOD)


def intraday_returns(series: IntradayPriceSeries) -> ReturnPanel:
    """
    Price differences between adjacent slots. The first slot of a day is
    differenced against the previous day's last price, so the first sample day
    only carries M-1 returns (its slot 0 is NaN).
    """
    if series.slots_per_day < 2:
        raise DataError("At least two slots per day are required to compute intraday returns")
    if not series.is_clean:
        raise DataError("Returns require a cleaned, strictly positive price series")

    flat = series.prices.reshape(-1)
    differences = np.empty_like(flat)
    differences[0] = np.nan
    differences[1:] = np.diff(flat)

    return ReturnPanel(
        days=series.days,
        slots_per_day=series.slots_per_day,
        returns=differences.reshape(series.prices.shape),
        demeaned=False,
    )


def seasonal_profile(panel: ReturnPanel, window: Tuple[date, date]) -> SeasonalProfile:
    start, end = window
    in_window = [index for index, day in enumerate(panel.days) if start <= day <= end]
    if not in_window:
        raise DataError(f"Empty estimation window {start} to {end} for the seasonal profile")

    groups: Dict[Tuple[int, int], List[int]] = {}
    for index in in_window:
        day = panel.days[index]
        groups.setdefault((day.month, day.weekday()), []).append(index)

    medians: Dict[Tuple[int, int, int], float] = {}
    for (month, weekday), indices in sorted(groups.items()):
        block = panel.returns[indices]
        for slot in range(panel.slots_per_day):
            cell = block[:, slot]
            cell = cell[np.isfinite(cell)]
            if cell.size:
                medians[(month, weekday, slot)] = float(np.median(cell))

    return SeasonalProfile(medians=medians, estimation_window=(start, end), slots_per_day=panel.slots_per_day)


def demean(panel: ReturnPanel, profile: SeasonalProfile) -> ReturnPanel:
    if panel.demeaned:
        raise DataError("Return panel is already demeaned")
    if panel.slots_per_day != profile.slots_per_day:
        raise DataError(
            f"Slot count mismatch: panel has {panel.slots_per_day} slots, profile has {profile.slots_per_day}"
        )

    adjustments = np.zeros_like(panel.returns)
    absent_cells = 0
    for row, day in enumerate(panel.days):
        for slot in range(panel.slots_per_day):
            median = profile.median_for(day, slot)
            if median is None:
                absent_cells += 1
            else:
                adjustments[row, slot] = median

    if absent_cells:
        logger.warning("%d day/slot cells have no seasonal median, left unadjusted", absent_cells)

    return ReturnPanel(
        days=panel.days,
        slots_per_day=panel.slots_per_day,
        returns=panel.returns - adjustments,
        demeaned=True,
    )


def close_to_close_returns(series: IntradayPriceSeries) -> Tuple[Tuple[date, ...], np.ndarray]:
    """
    Daily returns from the last price of each day, aligned with days[1:].
    """
    closes = series.prices[:, -1]
    return series.days[1:], np.diff(closes)
