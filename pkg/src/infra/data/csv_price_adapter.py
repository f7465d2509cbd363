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
import re
from dataclasses import dataclass
from datetime import date, datetime, timedelta
from pathlib import Path
from typing import BinaryIO, Dict, List, Optional, TextIO, Tuple, Union

import numpy as np
import pandas as pd

from src.config import MARKET_REGION, SLOTS_PER_DAY
from src.domain.errors import ConflictError, DataError, ParseError, PartialDayError
from src.domain.market.market_data_objects import CleaningReport, IntradayPriceSeries, ValidationSummary
from src.domain.market.price_source_port import PriceSourcePort

logger = logging.getLogger(__name__)

# Header is line 1, first data row is line 2
FIRST_DATA_LINE = 2


@dataclass(frozen=True)
class PriceCsvSchema:
    """
    Column mapping of a raw price table.

    Attributes:
        timestamp (str): ISO-8601 local timestamp column, period start.
        price (str): Spot price column ($/MWh).
        region (str): Region label column.
        demand (str): Optional demand column, passed through when present.
        supply (str): Optional supply column, passed through when present.
        region_filter (Optional[str]): Keep only rows of this region. Mandatory
            when the table holds more than one region.
    """

    timestamp: str = "timestamp"
    price: str = "price"
    region: str = "region"
    demand: str = "demand"
    supply: str = "supply"
    region_filter: Optional[str] = None


def ingest_csv(
    source: Union[BinaryIO, TextIO, Path],
    schema: PriceCsvSchema = PriceCsvSchema(),
    slots_per_day: int = SLOTS_PER_DAY,
    allow_truncation: bool = False,
    pad_missing_slots: bool = False,
) -> Tuple[IntradayPriceSeries, ValidationSummary]:
    """
    Parse a delimiter-separated price table into a day-by-slot grid.

    Args:
            source: Byte or text stream, or a path.
            schema (PriceCsvSchema): Column mapping.
            slots_per_day (int): Intervals per day.
            allow_truncation (bool): Drop an incomplete final day instead of failing.
            pad_missing_slots (bool): Pad missing inner slots with NaN (cleaned later)
                instead of failing.

    Returns:
            Tuple[IntradayPriceSeries, ValidationSummary]: The raw series and its validation findings.
    """
    frame = _read_frame(source)
    for column in (schema.timestamp, schema.price):
        if column not in frame.columns:
            raise DataError(f"Missing required column '{column}' in price table")

    frame = _filter_region(frame, schema)
    if frame.empty:
        raise DataError("Price table has no data rows")
    timestamps, prices = _parse_rows(frame, schema)

    minutes_per_slot = 24 * 60 // slots_per_day
    minutes = timestamps.dt.hour * 60 + timestamps.dt.minute
    off_grid = (minutes % minutes_per_slot != 0) | (timestamps.dt.second != 0)
    if off_grid.any():
        first = int(np.flatnonzero(off_grid.to_numpy())[0])
        raise ParseError(int(frame.index[first]) + FIRST_DATA_LINE, "timestamp is not on a slot boundary")

    keys = pd.DataFrame({"day": timestamps.dt.date, "slot": (minutes // minutes_per_slot).astype(int)})
    duplicated = keys.duplicated(keep="first")
    if duplicated.any():
        first = int(np.flatnonzero(duplicated.to_numpy())[0])
        raise ConflictError(
            f"Duplicate observation for {keys['day'].iloc[first]} slot {keys['slot'].iloc[first]} "
            f"(line {int(frame.index[first]) + FIRST_DATA_LINE})"
        )

    days: List[date] = sorted(set(keys["day"]))
    counts = keys.groupby("day")["slot"].count()
    truncated: Tuple[date, ...] = ()
    if counts[days[-1]] < slots_per_day:
        if not allow_truncation:
            raise PartialDayError(
                f"Final day {days[-1]} has {counts[days[-1]]} of {slots_per_day} slots, truncation not permitted"
            )
        truncated = (days[-1],)
        days = days[:-1]
        logger.warning("Dropped incomplete final day %s", truncated[0])
    if not days:
        raise DataError("No complete day in price table")

    row_of_day: Dict[date, int] = {day: row for row, day in enumerate(days)}
    rows = keys["day"].map(row_of_day)
    kept = rows.notna().to_numpy()
    row_index = rows[kept].to_numpy(dtype=int)
    slot_index = keys["slot"][kept].to_numpy(dtype=int)

    grid = np.full((len(days), slots_per_day), np.nan)
    grid[row_index, slot_index] = prices[kept]
    optional_grids: Dict[str, np.ndarray] = {}
    for name in (schema.demand, schema.supply):
        if name in frame.columns:
            values = np.full((len(days), slots_per_day), np.nan)
            values[row_index, slot_index] = pd.to_numeric(frame[name], errors="coerce").to_numpy(dtype=float)[kept]
            optional_grids[name] = values

    missing = np.argwhere(np.isnan(grid))
    padded = tuple((days[int(row)], int(slot)) for row, slot in missing)
    if padded and not pad_missing_slots:
        day, slot = padded[0]
        raise DataError(f"{len(padded)} missing slots, first at {day} slot {slot}; enable padding to accept them")
    if padded:
        logger.warning("Padded %d missing slots", len(padded))

    _warn_calendar_gaps(days)

    nonpositive = tuple((days[int(row)], int(slot)) for row, slot in np.argwhere(grid <= 0))
    if nonpositive:
        logger.warning("%d non-positive prices flagged for interpolation", len(nonpositive))

    region = schema.region_filter or _single_region(frame, schema)
    series = IntradayPriceSeries(
        days=tuple(days),
        slots_per_day=slots_per_day,
        prices=grid,
        region=region,
        demand=optional_grids.get(schema.demand),
        supply=optional_grids.get(schema.supply),
    )
    return series, ValidationSummary(
        nonpositive_positions=nonpositive, padded_positions=padded, truncated_days=truncated
    )


class CsvPriceAdapter(PriceSourcePort):
    """
    Price source backed by CSV files, raw on the way in and cleaned (with a
    `was_interpolated` flag) on the way out.
    """

    def __init__(
        self,
        schema: PriceCsvSchema = PriceCsvSchema(),
        slots_per_day: int = SLOTS_PER_DAY,
        allow_truncation: bool = False,
        pad_missing_slots: bool = False,
    ):
        self.schema = schema
        self.slots_per_day = slots_per_day
        self.allow_truncation = allow_truncation
        self.pad_missing_slots = pad_missing_slots

    def read_series(self, path: Path) -> Tuple[IntradayPriceSeries, ValidationSummary]:
        if not path.exists():
            raise DataError(f"Price table not found: {path}")
        with open(path, "rb") as source:
            return ingest_csv(source, self.schema, self.slots_per_day, self.allow_truncation, self.pad_missing_slots)

    def write_cleaned(self, series: IntradayPriceSeries, report: CleaningReport, path: Path) -> None:
        interpolated = np.zeros(series.prices.shape, dtype=int)
        row_of_day = {day: row for row, day in enumerate(series.days)}
        for day, slot in report.replaced_positions:
            interpolated[row_of_day[day], slot] = 1

        minutes_per_slot = 24 * 60 // series.slots_per_day
        columns: Dict[str, object] = {
            "timestamp": [
                (datetime.combine(day, datetime.min.time()) + timedelta(minutes=slot * minutes_per_slot)).strftime(
                    "%Y-%m-%dT%H:%M"
                )
                for day in series.days
                for slot in range(series.slots_per_day)
            ],
            "region": series.region,
            "price": series.prices.reshape(-1),
        }
        if series.demand is not None:
            columns["demand"] = series.demand.reshape(-1)
        if series.supply is not None:
            columns["supply"] = series.supply.reshape(-1)
        columns["was_interpolated"] = interpolated.reshape(-1)

        pd.DataFrame(columns).to_csv(path, index=False, lineterminator="\n")

    def read_cleaned(self, path: Path) -> IntradayPriceSeries:
        series, summary = CsvPriceAdapter(PriceCsvSchema(), self.slots_per_day).read_series(path)
        if summary.nonpositive_count:
            raise DataError(f"Cleaned panel {path} still holds non-positive prices")
        return series


# PRIVATE FUNCTIONS
def _read_frame(source: Union[BinaryIO, TextIO, Path]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(source, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise ParseError(1, "empty price table") from None
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        raise ParseError(int(match.group(1)) if match else 0, f"malformed row ({e})") from e
    return frame.fillna("")


def _filter_region(frame: pd.DataFrame, schema: PriceCsvSchema) -> pd.DataFrame:
    if schema.region_filter is None or schema.region not in frame.columns:
        return frame
    filtered = frame[frame[schema.region].str.strip() == schema.region_filter]
    if filtered.empty:
        raise DataError(f"No rows for region '{schema.region_filter}'")
    return filtered


def _single_region(frame: pd.DataFrame, schema: PriceCsvSchema) -> str:
    if schema.region not in frame.columns:
        return MARKET_REGION
    regions = sorted(set(frame[schema.region].str.strip()))
    if len(regions) > 1:
        raise DataError(f"Price table holds several regions ({', '.join(regions)}), a region filter is required")
    return regions[0] if regions and regions[0] else MARKET_REGION


def _parse_rows(frame: pd.DataFrame, schema: PriceCsvSchema) -> Tuple[pd.Series, np.ndarray]:
    timestamps = pd.to_datetime(frame[schema.timestamp].str.strip(), format="ISO8601", errors="coerce")
    if getattr(timestamps.dt, "tz", None) is not None:
        timestamps = timestamps.dt.tz_localize(None)
    prices = pd.to_numeric(frame[schema.price].str.strip(), errors="coerce")

    bad_rows = timestamps.isna().to_numpy() | prices.isna().to_numpy()
    if bad_rows.any():
        first = int(np.flatnonzero(bad_rows)[0])
        raw = ",".join(str(value) for value in frame.iloc[first].to_numpy() if value != "")
        raise ParseError(int(frame.index[first]) + FIRST_DATA_LINE, f"cannot parse timestamp/price in '{raw}'")

    return timestamps, prices.to_numpy(dtype=float)


def _warn_calendar_gaps(days: List[date]) -> None:
    gaps = sum(1 for previous, current in zip(days, days[1:]) if (current - previous).days > 1)
    if gaps:
        logger.warning("Price table has %d calendar gaps between trading days", gaps)
