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
from pathlib import Path
from typing import Dict

from src.domain.errors import DataError
from src.domain.weather.weather_corpus_port import WeatherCorpusPort

logger = logging.getLogger(__name__)

_REPORT_NAME = re.compile(r"^(\d{4})\.txt$")


class FileCorpusAdapter(WeatherCorpusPort):
    """
    Reads a directory of annual weather reports named `<year>.txt`. Other
    files are ignored.
    """

    def read_documents(self, directory: Path) -> Dict[str, str]:
        if not directory.is_dir():
            raise DataError(f"Weather corpus directory not found: {directory}")
        documents: Dict[str, str] = {}
        for path in sorted(directory.iterdir()):
            match = _REPORT_NAME.match(path.name)
            if match is None:
                if path.is_file():
                    logger.debug("Skipping %s, not a yearly report", path.name)
                continue
            documents[match.group(1)] = path.read_text(encoding="utf-8")
        if not documents:
            raise DataError(f"No <year>.txt report in {directory}")
        return documents
