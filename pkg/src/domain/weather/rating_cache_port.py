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

from abc import ABC, abstractmethod
from typing import Optional

from src.domain.weather.weather_data_objects import WeatherRating


class RatingCachePort(ABC):
    """
    This port stores ratings keyed by period, prompt hash and provider id.
    """

    @abstractmethod
    def get(self, key: str) -> Optional[WeatherRating]:
        """
        Returns:
            Optional[WeatherRating]: The stored rating flagged as cached, None on a miss.
        """
        pass

    @abstractmethod
    def put(self, key: str, rating: WeatherRating) -> None:
        pass
