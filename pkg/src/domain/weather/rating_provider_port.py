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
from typing import Sequence, Tuple

from src.domain.weather.weather_data_objects import RatingRequest


class RatingProviderPort(ABC):
    """
    This port submits scoring prompts to a language model (or its offline
    stand-in) and returns the raw replies.
    """

    @property
    @abstractmethod
    def provider_id(self) -> str:
        """
        Returns:
            str: Identifier taking part in the rating cache key.
        """
        pass

    @abstractmethod
    def complete(self, request: RatingRequest) -> str:
        """
        Args:
            request (RatingRequest): Prompt and retrieved context of one period.

        Returns:
            str: Raw reply text.
        """
        pass

    def complete_many(self, requests: Sequence[RatingRequest]) -> Tuple[str, ...]:
        """
        Replies in request order. Providers able to overlap requests override it.
        """
        return tuple(self.complete(request) for request in requests)
