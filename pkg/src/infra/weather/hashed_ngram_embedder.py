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

import hashlib
from typing import Sequence

import numpy as np

from src.config import EMBEDDER_DIMENSION, EMBEDDER_NGRAM
from src.domain.weather.embedder_port import EmbedderPort


class HashedNgramEmbedder(EmbedderPort):
    """
    Deterministic bag of character n-grams hashed into a fixed number of
    buckets. Texts are lower-cased and whitespace-collapsed first.
    """

    def __init__(self, dimension: int = EMBEDDER_DIMENSION, ngram: int = EMBEDDER_NGRAM):
        self.dimension = dimension
        self.ngram = ngram

    @property
    def embedder_id(self) -> str:
        return f"hashed-ngram-{self.ngram}x{self.dimension}"

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        vectors = np.zeros((len(texts), self.dimension))
        for row, text in enumerate(texts):
            normalized = " ".join(text.lower().split())
            for start in range(max(len(normalized) - self.ngram + 1, 0)):
                gram = normalized[start : start + self.ngram].encode("utf-8")
                bucket = int.from_bytes(hashlib.blake2b(gram, digest_size=8).digest(), "little") % self.dimension
                vectors[row, bucket] += 1.0
        return vectors
