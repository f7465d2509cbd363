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

from datetime import date, timedelta
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from src.domain.features.feature_builder import assemble
from src.domain.features.feature_data_objects import FeatureColumn, FeatureMatrix
from src.domain.realized.realized_data_objects import DailyRealizedMeasures
from src.domain.realized.realized_estimators import transform

"""
Helpers shared by the unit tests: paths of the bundled test data and small
builders of synthetic measures and feature matrices.
"""

TESTS_DIR: Path = Path(__file__).resolve().parent.parent
TESTS_DATA_PATH = Path(TESTS_DIR, "tests_data")
PRICES_TWO_DAYS_PATH = Path(TESTS_DATA_PATH, "prices_two_days.csv")
RULE_TABLE_PATH = Path(TESTS_DATA_PATH, "rules.toml")
CORPUS_PATH = Path(TESTS_DATA_PATH, "corpus")
CONFIG_PATH = Path(TESTS_DATA_PATH, "faep.toml")

START_DAY = date(2010, 1, 1)


def consecutive_days(count: int, start: date = START_DAY) -> tuple:
    return tuple(start + timedelta(days=offset) for offset in range(count))


def synthetic_measures(count: int, seed: int = 0, jump_share: float = 0.2) -> tuple:
    """
    Daily measures with a persistent continuous component and occasional jumps.
    """
    rng = np.random.default_rng(seed)
    measures = []
    level = 1.0
    for day in consecutive_days(count):
        level = 0.2 + 0.8 * level + 0.1 * abs(rng.standard_normal())
        jump = float(rng.exponential(0.5)) if rng.random() < jump_share else 0.0
        cv = float(level)
        rv = cv + jump
        measures.append(
            transform(
                DailyRealizedMeasures(
                    day=day, m=48, rv=rv, bpv=cv, tpq=cv**2, rq=1.5 * rv**2, z=3.0 if jump else 0.5, jump=jump, cv=cv
                )
            )
        )
    return tuple(measures)


def matrix_from_columns(
    columns: dict,
    target: Sequence[float],
    model_features: Optional[Sequence[str]] = None,
    mask: Optional[Sequence[bool]] = None,
) -> FeatureMatrix:
    """
    Feature matrix over consecutive days from plain arrays.
    """
    target = np.asarray(target, dtype=float)
    days = consecutive_days(len(target))
    feature_columns = tuple(
        FeatureColumn(name, np.asarray(values, dtype=float), "", "test") for name, values in columns.items()
    )
    return FeatureMatrix(
        days=days,
        columns=feature_columns,
        target=target,
        target_name="RV_next",
        mask=np.isfinite(target) if mask is None else np.asarray(mask, dtype=bool),
        model_features=tuple(model_features if model_features is not None else columns),
    )


def synthetic_daily_returns(measures: Sequence[DailyRealizedMeasures], seed: int = 0) -> dict:
    rng = np.random.default_rng(seed + 1)
    return {measure.day: float(rng.standard_normal()) for measure in measures}


def har_matrix(count: int = 300, seed: int = 0) -> FeatureMatrix:
    measures = synthetic_measures(count, seed)
    return assemble(measures, None, daily_returns=synthetic_daily_returns(measures, seed))
