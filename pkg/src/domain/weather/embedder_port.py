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
from typing import Sequence

import numpy as np


class EmbedderPort(ABC):
    """
    This port turns texts into fixed-dimension vectors for chunk retrieval.
    """

    @property
    @abstractmethod
    def embedder_id(self) -> str:
        """
        Returns:
            str: Provenance label stored in the retrieval index.
        """
        pass

    @abstractmethod
    def embed(self, texts: Sequence[str]) -> np.ndarray:
        """
        Args:
            texts (Sequence[str]): Texts to embed.

        Returns:
            np.ndarray: One row per text, all rows of the same dimension.
        """
        pass
