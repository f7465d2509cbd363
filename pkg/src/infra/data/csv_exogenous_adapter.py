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
from pathlib import Path

import numpy as np
import pandas as pd

from src.domain.errors import DataError, ParseError
from src.domain.features.exogenous_source_port import ExogenousSourcePort
from src.domain.features.feature_data_objects import EXOGENOUS_COLUMNS, ExogenousTable

logger = logging.getLogger(__name__)


class CsvExogenousAdapter(ExogenousSourcePort):
    """
    Reads the daily factor table: a `date` column followed by any of the known
    exogenous columns, blank cells meaning missing.
    """

    def read_table(self, path: Path) -> ExogenousTable:
        if not path.exists():
            raise DataError(f"Exogenous table not found: {path}")
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
        if "date" not in frame.columns:
            raise DataError(f"Exogenous table {path} has no 'date' column")

        unknown = [column for column in frame.columns if column != "date" and column not in EXOGENOUS_COLUMNS]
        if unknown:
            logger.warning("Ignoring unknown exogenous columns: %s", ", ".join(unknown))

        days = pd.to_datetime(frame["date"].str.strip(), format="ISO8601", errors="coerce")
        if days.isna().any():
            first = int(np.flatnonzero(days.isna().to_numpy())[0])
            raise ParseError(first + 2, f"cannot parse date '{frame['date'].iloc[first]}'")
        if days.duplicated().any():
            raise DataError(f"Exogenous table {path} holds duplicate dates")

        columns = {}
        for name in EXOGENOUS_COLUMNS:
            if name not in frame.columns:
                continue
            raw = frame[name].str.strip()
            values = pd.to_numeric(raw.replace("", np.nan), errors="coerce")
            malformed = values.isna() & (raw != "")
            if malformed.any():
                first = int(np.flatnonzero(malformed.to_numpy())[0])
                raise ParseError(first + 2, f"cannot parse {name} value '{raw.iloc[first]}'")
            columns[name] = values.to_numpy(dtype=float)

        return ExogenousTable(days=tuple(day.date() for day in days), columns=columns)
