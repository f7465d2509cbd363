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

import json
import logging
import threading
from pathlib import Path
from typing import Dict, Optional

from src.domain.weather.rating_cache_port import RatingCachePort
from src.domain.weather.weather_data_objects import WeatherRating

logger = logging.getLogger(__name__)


class JsonlRatingCache(RatingCachePort):
    """
    Append-only rating cache, one JSON object per line with its key. The
    last line of a key wins; unreadable lines are skipped.
    """

    def __init__(self, cache_file: Path):
        self.cache_file = cache_file
        self.__lock = threading.Lock()
        self.__entries: Optional[Dict[str, dict]] = None

    def get(self, key: str) -> Optional[WeatherRating]:
        with self.__lock:
            document = self.__load().get(key)
        return WeatherRating.from_document(document, cached=True) if document is not None else None

    def put(self, key: str, rating: WeatherRating) -> None:
        document = rating.to_document()
        with self.__lock:
            self.__load()[key] = document
            self.cache_file.parent.mkdir(parents=True, exist_ok=True)
            with open(self.cache_file, "a", encoding="utf-8") as file:
                file.write(json.dumps({"key": key, "rating": document}, sort_keys=True) + "\n")

    # PRIVATE METHODS
    def __load(self) -> Dict[str, dict]:
        if self.__entries is None:
            self.__entries = {}
            if self.cache_file.exists():
                for number, line in enumerate(self.cache_file.read_text(encoding="utf-8").splitlines(), start=1):
                    try:
                        entry = json.loads(line)
                        self.__entries[entry["key"]] = entry["rating"]
                    except (json.JSONDecodeError, KeyError, TypeError):
                        logger.warning("Skipping unreadable line %d of %s", number, self.cache_file)
        return self.__entries
