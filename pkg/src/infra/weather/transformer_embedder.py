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

from typing import Sequence

import numpy as np

from src.domain.errors import ProviderError
from src.domain.weather.embedder_port import EmbedderPort

MODEL_NAME = "paraphrase-multilingual-mpnet-base-v2"


class TransformerEmbedder(EmbedderPort):
    """
    Sentence embeddings computed by a pre-trained transformer.

    The model used is "paraphrase-multilingual-mpnet-base-v2", loaded lazily
    on the first call since the download and load take several seconds.

    Attributes:
        __model (SentenceTransformer): Loaded model, None until first use.
    """

    def __init__(self, model_name: str = MODEL_NAME):
        self.model_name = model_name
        self.__model = None

    @property
    def embedder_id(self) -> str:
        return f"transformer-{self.model_name}"

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        try:
            return np.asarray(self.__get_model().encode(list(texts), normalize_embeddings=True), dtype=float)
        except ImportError as e:
            raise ProviderError("The transformer embedder needs the 'transformer' extra (sentence-transformers)") from e

    # PRIVATE METHODS
    def __get_model(self):
        if self.__model is None:
            from sentence_transformers import SentenceTransformer

            self.__model = SentenceTransformer(self.model_name)
        return self.__model
