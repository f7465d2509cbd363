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

import calendar
import hashlib
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np

from src.config import CHUNK_OVERLAP, CHUNK_SIZE, TOP_K_CHUNKS
from src.domain.errors import ConfigValidationError, DataError, ScoringError

OFFLINE_PROVIDER = "offline"
REMOTE_PROVIDER = "remote"
YEARLY = "year"
MONTHLY = "month"


@dataclass(frozen=True)
class DocumentChunk:
    """
    Contiguous slice of a weather report.

    Attributes:
        doc_id (str): Source label, the report year.
        chunk_index (int): Position of the chunk in its document.
        text (str): Chunk text, document[start:end].
        char_span (Tuple[int, int]): Half-open character span in the document.
    """

    doc_id: str
    chunk_index: int
    text: str
    char_span: Tuple[int, int]

    def __post_init__(self) -> None:
        start, end = self.char_span
        if start < 0 or end < start or end - start != len(self.text):
            raise DataError(f"Chunk {self.doc_id}#{self.chunk_index} has an inconsistent span {self.char_span}")

    @property
    def chunk_id(self) -> str:
        return f"{self.doc_id}#{self.chunk_index}"


@dataclass(frozen=True, eq=False)
class RetrievalIndex:
    """
    Chunks and their unit-length embeddings, one row per chunk.
    """

    chunks: Tuple[DocumentChunk, ...]
    vectors: np.ndarray
    embedder_id: str

    def __post_init__(self) -> None:
        vectors = np.array(self.vectors, dtype=float, copy=True)
        if vectors.ndim != 2 or vectors.shape[0] != len(self.chunks):
            raise DataError(f"Index holds {vectors.shape[0] if vectors.ndim else 0} vectors for {len(self.chunks)} chunks")
        vectors.flags.writeable = False
        object.__setattr__(self, "vectors", vectors)

    def __len__(self) -> int:
        return len(self.chunks)

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class ChunkMatch:
    chunk: DocumentChunk
    score: float


@dataclass(frozen=True)
class WeatherRating:
    """
    Weather severity rating of one period.

    Attributes:
        period (str): "YYYY" for a year, "YYYY-MM" for a month.
        score (int): Rating in 1..5.
        rationale (str): Raw reply of the scorer.
        top_chunks (Tuple[str, ...]): Ids of the retrieved chunks.
        provider (str): Provider id.
        cached (bool): True when the rating was served from the cache.
    """

    period: str
    score: int
    rationale: str
    top_chunks: Tuple[str, ...]
    provider: str
    cached: bool = False

    def __post_init__(self) -> None:
        if isinstance(self.score, bool) or not isinstance(self.score, int) or not 1 <= self.score <= 5:
            raise ScoringError(f"Weather rating for {self.period} must be an integer in 1..5, got {self.score!r}")

    def to_document(self) -> Dict:
        return {
            "period": self.period,
            "score": self.score,
            "rationale": self.rationale,
            "top_chunks": list(self.top_chunks),
            "provider": self.provider,
        }

    @classmethod
    def from_document(cls, document: Dict, cached: bool = False) -> "WeatherRating":
        return cls(
            period=document["period"],
            score=document["score"],
            rationale=document["rationale"],
            top_chunks=tuple(document["top_chunks"]),
            provider=document["provider"],
            cached=cached,
        )


@dataclass(frozen=True)
class RuleTable:
    """
    Keyword weights of the offline scorer: the reply score is `base` plus the
    weight of every distinct keyword found in the period's context.
    """

    base: int = 1
    weights: Dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class ProviderConfig:
    """
    Scorer settings.

    Attributes:
        kind (str): "offline" (keyword rules) or "remote" (chat completion over HTTP).
        endpoint (str): Completion URL, remote only.
        token_env (str): Name of the environment variable holding the bearer token.
        model (str): Model name sent to the remote endpoint.
        timeout (float): Request timeout in seconds.
        max_retries (int): Retries after a failed request.
        parallelism (int): Maximum concurrent requests.
        rule_table (Optional[RuleTable]): Offline keyword rules.
        cache_file (Optional[Path]): Rating cache location, the user cache directory when None.
    """

    kind: str = OFFLINE_PROVIDER
    endpoint: str = ""
    token_env: str = "FAEP_PROVIDER_TOKEN"
    model: str = "gpt-3.5-turbo"
    timeout: float = 30.0
    max_retries: int = 3
    parallelism: int = 4
    rule_table: Optional[RuleTable] = None
    cache_file: Optional[Path] = None

    def __post_init__(self) -> None:
        if self.kind not in (OFFLINE_PROVIDER, REMOTE_PROVIDER):
            raise ConfigValidationError(f"Unknown provider kind '{self.kind}', expected offline or remote")
        if self.kind == REMOTE_PROVIDER and not self.endpoint:
            raise ConfigValidationError("A remote provider needs an endpoint")
        if self.parallelism < 1:
            raise ConfigValidationError(f"Provider parallelism must be at least 1, got {self.parallelism}")
        if self.max_retries < 0 or self.timeout <= 0:
            raise ConfigValidationError("Provider retries must be non-negative and the timeout positive")


@dataclass(frozen=True)
class RatingSettings:
    chunk_size: int = CHUNK_SIZE
    overlap: int = CHUNK_OVERLAP
    top_k: int = TOP_K_CHUNKS
    granularity: str = YEARLY
    embedder: str = "hashed"

    def __post_init__(self) -> None:
        if not 0 <= self.overlap < self.chunk_size:
            raise ConfigValidationError(f"Chunk overlap must lie in [0, {self.chunk_size}), got {self.overlap}")
        if self.top_k < 1:
            raise ConfigValidationError(f"Retrieval top-k must be at least 1, got {self.top_k}")
        if self.granularity not in (YEARLY, MONTHLY):
            raise ConfigValidationError(f"Unknown rating granularity '{self.granularity}', expected year or month")
        if self.embedder not in ("hashed", "transformer"):
            raise ConfigValidationError(f"Unknown embedder '{self.embedder}', expected hashed or transformer")


@dataclass(frozen=True)
class PromptTemplate:
    """
    Versioned scoring prompt: a system text and a user text with {period},
    {context} and {question} placeholders.
    """

    version: str
    system: str
    user: str

    @property
    def digest(self) -> str:
        return hashlib.sha256(f"{self.version}\n{self.system}\n---\n{self.user}".encode("utf-8")).hexdigest()

    def render(self, period_label: str, context: str, question: str) -> str:
        return self.user.format(period=period_label, context=context, question=question)


@dataclass(frozen=True)
class RatingRequest:
    """
    One completion request. The offline scorer reads the structured fields,
    the remote one only sends `system` and `user`.
    """

    period_label: str
    system: str
    user: str
    context_chunks: Tuple[str, ...]


def period_label(period: str) -> str:
    """
    Human label of a period: "2010" stays "2010", "2010-03" becomes "March 2010".
    """
    if len(period) == 4:
        return period
    year, month = period.split("-")
    return f"{calendar.month_name[int(month)]} {year}"


def period_of(day: date, granularity: str) -> str:
    return f"{day.year:04d}" if granularity == YEARLY else f"{day.year:04d}-{day.month:02d}"
