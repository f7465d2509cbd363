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

import io
from datetime import date, timedelta

import numpy as np
import pandas as pd
import pytest

from src.domain.errors import ConflictError, DataError, ParseError, PartialDayError, UnrecoverableDataError
from src.domain.market.market_data_objects import IntradayPriceSeries, ReturnPanel
from src.domain.market.market_data_provider import (
    clean_nonpositive,
    close_to_close_returns,
    demean,
    intraday_returns,
    seasonal_profile,
)
from src.infra.data.csv_price_adapter import CsvPriceAdapter, PriceCsvSchema, ingest_csv
from tests.unit.helper import PRICES_TWO_DAYS_PATH


def one_day_series(prices, day: date = date(2010, 1, 1)) -> IntradayPriceSeries:
    return IntradayPriceSeries(days=(day,), slots_per_day=len(prices), prices=np.array([prices]), region="NSW")


def test_ingest_csv_Should_build_a_day_by_slot_grid_and_flag_non_positive_prices() -> None:
    # Given
    with open(PRICES_TWO_DAYS_PATH, "rb") as source:
        # When
        series, summary = ingest_csv(source)

    # Then
    assert series.days == (date(2010, 1, 1), date(2010, 1, 2)), f"Actual days = {series.days}"
    assert series.prices.shape == (2, 48), f"Actual shape = {series.prices.shape}"
    assert series.region == "NSW", f"Actual region = {series.region}"
    assert series.demand is not None and series.demand[0, 3] == 7003, f"Actual demand = {series.demand}"
    assert summary.nonpositive_positions == ((date(2010, 1, 2), 10),), (
        f"Actual non-positive positions = {summary.nonpositive_positions}"
    )
    assert series.prices[1, 10] == -1.0, f"Actual flagged price = {series.prices[1, 10]}"


def test_ingest_csv_Should_name_the_row_When_a_price_cannot_be_parsed() -> None:
    # Given
    source = io.StringIO("timestamp,price\n2010-01-01,abc\n")

    # When
    with pytest.raises(ParseError) as error:
        ingest_csv(source, slots_per_day=48)

    # Then
    assert error.value.row_number == 2, f"Actual row number = {error.value.row_number}"
    assert "abc" in str(error.value), f"Actual message = {error.value}"


def test_ingest_csv_Should_raise_a_conflict_When_a_slot_is_duplicated() -> None:
    # Given
    source = io.StringIO("timestamp,price\n2010-01-01T00:00,10\n2010-01-01T12:00,11\n2010-01-01T00:00,12\n")

    # When / Then
    with pytest.raises(ConflictError):
        ingest_csv(source, slots_per_day=2)


def test_ingest_csv_Should_reject_an_incomplete_final_day_unless_truncation_is_allowed() -> None:
    # Given
    text = "timestamp,price\n2010-01-01T00:00,10\n2010-01-01T12:00,11\n2010-01-02T00:00,12\n"

    # When / Then
    with pytest.raises(PartialDayError):
        ingest_csv(io.StringIO(text), slots_per_day=2)

    # When
    series, summary = ingest_csv(io.StringIO(text), slots_per_day=2, allow_truncation=True)

    # Then
    assert series.days == (date(2010, 1, 1),), f"Actual days = {series.days}"
    assert summary.truncated_days == (date(2010, 1, 2),), f"Actual truncated days = {summary.truncated_days}"


def test_ingest_csv_Should_pad_missing_inner_slots_only_on_request() -> None:
    # Given
    text = "timestamp,price\n2010-01-01T00:00,10\n2010-01-02T00:00,12\n2010-01-02T12:00,13\n"

    # When / Then
    with pytest.raises(DataError):
        ingest_csv(io.StringIO(text), slots_per_day=2)

    # When
    series, summary = ingest_csv(io.StringIO(text), slots_per_day=2, pad_missing_slots=True)

    # Then
    assert summary.padded_positions == ((date(2010, 1, 1), 1),), f"Actual padded = {summary.padded_positions}"
    assert np.isnan(series.prices[0, 1]), f"Actual padded price = {series.prices[0, 1]}"


def test_ingest_csv_Should_require_a_region_filter_When_several_regions_are_present() -> None:
    # Given
    text = (
        "timestamp,region,price\n"
        "2010-01-01T00:00,NSW,10\n2010-01-01T12:00,NSW,11\n"
        "2010-01-01T00:00,VIC,20\n2010-01-01T12:00,VIC,21\n"
    )

    # When / Then
    with pytest.raises(DataError):
        ingest_csv(io.StringIO(text), slots_per_day=2)

    # When
    series, _ = ingest_csv(io.StringIO(text), PriceCsvSchema(region_filter="VIC"), slots_per_day=2)

    # Then
    assert series.region == "VIC", f"Actual region = {series.region}"
    assert series.prices.tolist() == [[20.0, 21.0]], f"Actual prices = {series.prices}"


def test_clean_nonpositive_Should_use_the_earlier_neighbor_When_both_are_equidistant() -> None:
    # Given
    series = one_day_series([10.0, -1.0, 20.0])

    # When
    cleaned, report = clean_nonpositive(series)

    # Then
    assert cleaned.prices.tolist() == [[10.0, 10.0, 20.0]], f"Actual prices = {cleaned.prices}"
    assert report.replaced_positions == ((date(2010, 1, 1), 1),), f"Actual positions = {report.replaced_positions}"


def test_clean_nonpositive_Should_use_the_nearest_positive_price() -> None:
    # Given
    series = one_day_series([5.0, 0.0, 0.0, 8.0])

    # When
    cleaned, report = clean_nonpositive(series)

    # Then
    assert cleaned.prices.tolist() == [[5.0, 5.0, 8.0, 8.0]], f"Actual prices = {cleaned.prices}"
    assert report.replaced_count == 2, f"Actual replaced count = {report.replaced_count}"


def test_clean_nonpositive_Should_leave_a_positive_series_unchanged() -> None:
    # Given
    series = one_day_series([5.0, 6.0, 7.0])

    # When
    cleaned, report = clean_nonpositive(series)

    # Then
    assert np.array_equal(cleaned.prices, series.prices), f"Actual prices = {cleaned.prices}"
    assert report.replaced_count == 0, f"Actual replaced count = {report.replaced_count}"


def test_clean_nonpositive_Should_fail_When_every_price_is_non_positive() -> None:
    # Given
    series = one_day_series([0.0, -3.0, -1.0])

    # When / Then
    with pytest.raises(UnrecoverableDataError):
        clean_nonpositive(series)


def test_intraday_returns_Should_leave_the_first_slot_of_the_sample_undefined() -> None:
    # Given
    series = one_day_series([10.0, 10.1, 9.9, 10.2])

    # When
    panel = intraday_returns(series)

    # Then
    assert np.isnan(panel.returns[0, 0]), f"Actual first return = {panel.returns[0, 0]}"
    assert np.allclose(panel.day_returns(0), [0.1, -0.2, 0.3]), f"Actual returns = {panel.day_returns(0)}"


def test_intraday_returns_Should_difference_the_first_slot_against_the_previous_close() -> None:
    # Given
    series = IntradayPriceSeries(
        days=(date(2010, 1, 1), date(2010, 1, 2)),
        slots_per_day=2,
        prices=np.array([[19.0, 20.0], [21.0, 22.5]]),
        region="NSW",
    )

    # When
    panel = intraday_returns(series)

    # Then
    assert panel.returns[1].tolist() == [1.0, 1.5], f"Actual second day returns = {panel.returns[1]}"


def test_intraday_returns_Should_give_zero_returns_for_a_constant_price() -> None:
    # Given
    series = IntradayPriceSeries(
        days=(date(2010, 1, 1), date(2010, 1, 2)), slots_per_day=48, prices=np.full((2, 48), 30.0), region="NSW"
    )

    # When
    panel = intraday_returns(series)

    # Then
    assert np.all(panel.returns[np.isfinite(panel.returns)] == 0), f"Actual returns = {panel.returns}"


def test_intraday_returns_Should_fail_on_single_slot_days() -> None:
    # Given
    series = one_day_series([10.0])

    # When / Then
    with pytest.raises(DataError):
        intraday_returns(series)


def test_seasonal_profile_Should_take_the_median_of_each_month_weekday_slot_cell() -> None:
    # Given three Mondays of January 2010
    days = (date(2010, 1, 4), date(2010, 1, 11), date(2010, 1, 18))
    panel = ReturnPanel(days=days, slots_per_day=2, returns=np.array([[1.0, 4.0], [2.0, 4.0], [100.0, 4.0]]))

    # When
    profile = seasonal_profile(panel, (days[0], days[-1]))

    # Then
    assert profile.median_for(days[0], 0) == 2.0, f"Actual median = {profile.median_for(days[0], 0)}"
    assert profile.median_for(days[0], 1) == 4.0, f"Actual median = {profile.median_for(days[0], 1)}"


def test_seasonal_profile_Should_fail_on_an_empty_window() -> None:
    # Given
    panel = ReturnPanel(days=(date(2010, 1, 4),), slots_per_day=2, returns=np.array([[1.0, 2.0]]))

    # When / Then
    with pytest.raises(DataError):
        seasonal_profile(panel, (date(2011, 1, 1), date(2011, 12, 31)))


def test_demean_Should_subtract_the_profile_median() -> None:
    # Given
    days = (date(2010, 1, 4), date(2010, 1, 11))
    estimation = ReturnPanel(days=days, slots_per_day=2, returns=np.array([[0.2, 0.0], [0.2, 0.0]]))
    panel = ReturnPanel(days=days, slots_per_day=2, returns=np.array([[0.5, 0.0], [0.2, 1.0]]))
    profile = seasonal_profile(estimation, (days[0], days[-1]))

    # When
    demeaned = demean(panel, profile)

    # Then
    assert np.allclose(demeaned.returns, [[0.3, 0.0], [0.0, 1.0]]), f"Actual returns = {demeaned.returns}"
    assert demeaned.demeaned, "Panel should be flagged as demeaned"


def test_demean_Should_fail_When_slot_counts_differ() -> None:
    # Given
    days = (date(2010, 1, 4),)
    profile = seasonal_profile(ReturnPanel(days, 2, np.array([[0.1, 0.2]])), (days[0], days[0]))
    panel = ReturnPanel(days, 3, np.array([[0.1, 0.2, 0.3]]))

    # When / Then
    with pytest.raises(DataError):
        demean(panel, profile)


def test_close_to_close_returns_Should_difference_the_last_price_of_each_day() -> None:
    # Given
    series = IntradayPriceSeries(
        days=(date(2010, 1, 1), date(2010, 1, 2), date(2010, 1, 3)),
        slots_per_day=2,
        prices=np.array([[10.0, 20.0], [15.0, 25.0], [30.0, 22.0]]),
        region="NSW",
    )

    # When
    days, returns = close_to_close_returns(series)

    # Then
    assert days == (date(2010, 1, 2), date(2010, 1, 3)), f"Actual days = {days}"
    assert returns.tolist() == [5.0, -3.0], f"Actual returns = {returns}"


def test_write_cleaned_Should_flag_interpolated_prices_and_read_back_the_same_series(tmp_path) -> None:
    # Given
    adapter = CsvPriceAdapter()
    raw, _ = adapter.read_series(PRICES_TWO_DAYS_PATH)
    cleaned, report = clean_nonpositive(raw)
    path = tmp_path / "cleaned_prices.csv"

    # When
    adapter.write_cleaned(cleaned, report, path)
    frame = pd.read_csv(path)
    restored = adapter.read_cleaned(path)

    # Then
    assert int(frame["was_interpolated"].sum()) == 1, f"Actual flags = {frame['was_interpolated'].sum()}"
    assert frame["timestamp"].iloc[58] == "2010-01-02T05:00", f"Actual timestamp = {frame['timestamp'].iloc[58]}"
    assert restored.days == cleaned.days, f"Actual days = {restored.days}"
    assert np.array_equal(restored.prices, cleaned.prices), f"Actual prices = {restored.prices}"


def random_series(days: int = 60, seed: int = 0, nonpositive_share: float = 0.05) -> IntradayPriceSeries:
    rng = np.random.default_rng(seed)
    prices = 50.0 + np.cumsum(rng.normal(0.0, 1.0, (days, 48)), axis=1)
    prices[rng.random(prices.shape) < nonpositive_share] = -1.0
    day_list = tuple(date(2010, 1, 1) + timedelta(days=offset) for offset in range(days))
    return IntradayPriceSeries(days=day_list, slots_per_day=48, prices=prices, region="NSW")


def test_clean_nonpositive_Should_change_nothing_When_applied_twice() -> None:
    # Given
    cleaned, report = clean_nonpositive(random_series())

    # When
    again, second_report = clean_nonpositive(cleaned)

    # Then
    assert report.replaced_count > 0, "The first pass should replace the planted prices"
    assert np.array_equal(again.prices, cleaned.prices), "A second pass should keep every price"
    assert second_report.replaced_count == 0, f"Actual replaced count = {second_report.replaced_count}"


def test_intraday_returns_Should_sum_to_the_price_change_over_the_sample() -> None:
    # Given
    series, _ = clean_nonpositive(random_series(days=5, seed=1))

    # When
    panel = intraday_returns(series)

    # Then
    total = float(np.nansum(panel.returns))
    expected = float(series.prices[-1, -1] - series.prices[0, 0])
    assert total == pytest.approx(expected, abs=1e-9), f"Actual sum = {total}, expected {expected}"
    first_day = float(np.sum(panel.day_returns(0)))
    assert first_day == pytest.approx(float(series.prices[0, -1] - series.prices[0, 0]), abs=1e-9)


def test_demean_Should_restore_the_raw_returns_When_the_profile_is_added_back() -> None:
    # Given
    series, _ = clean_nonpositive(random_series(days=90, seed=2))
    panel = intraday_returns(series)
    profile = seasonal_profile(panel, (panel.days[0], panel.days[59]))

    # When
    demeaned = demean(panel, profile)

    # Then
    medians = np.array(
        [
            [profile.median_for(day, slot) or 0.0 for slot in range(panel.slots_per_day)]
            for day in panel.days
        ]
    )
    restored = demeaned.returns + medians
    finite = np.isfinite(panel.returns)
    assert np.array_equal(finite, np.isfinite(restored))
    assert np.max(np.abs(restored[finite] - panel.returns[finite])) <= 1e-12


def test_seasonal_profile_Should_not_depend_on_the_order_of_days_within_a_cell() -> None:
    # Given
    rng = np.random.default_rng(3)
    days = tuple(date(2010, 1, 1) + timedelta(days=offset) for offset in range(120))
    returns = rng.normal(0.0, 1.0, (120, 4))
    shuffled = returns.copy()
    cells: dict = {}
    for row, day in enumerate(days):
        cells.setdefault((day.month, day.weekday()), []).append(row)
    for rows in cells.values():
        shuffled[rows] = returns[rng.permutation(rows)]
    window = (days[0], days[-1])

    # When
    profile = seasonal_profile(ReturnPanel(days, 4, returns), window)
    shuffled_profile = seasonal_profile(ReturnPanel(days, 4, shuffled), window)

    # Then
    assert not np.array_equal(shuffled, returns), "The rows should have moved"
    assert shuffled_profile.medians == profile.medians
