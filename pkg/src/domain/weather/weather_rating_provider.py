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
from datetime import date
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config import TOP_K_CHUNKS
from src.domain.errors import ConfigValidationError, DataError, ProviderError, ScoringError
from src.domain.weather.embedder_port import EmbedderPort
from src.domain.weather.rating_cache_port import RatingCachePort
from src.domain.weather.rating_provider_port import RatingProviderPort
from src.domain.weather.weather_data_objects import (
    MONTHLY,
    YEARLY,
    ChunkMatch,
    DocumentChunk,
    PromptTemplate,
    RatingRequest,
    RetrievalIndex,
    WeatherRating,
    period_label,
    period_of,
)

logger = logging.getLogger(__name__)

QUESTION = (
    "How severe were the weather conditions for electricity demand and prices in {period}? "
    "Answer with a single rating from 1 (mild) to 5 (extreme) followed by a short justification."
)
CONTEXT_SEPARATOR = "\n\n"
_INTEGER_TOKEN = re.compile(r"-?\d+")


def chunk(document: str, chunk_size: int, overlap: int, doc_id: str = "") -> Tuple[DocumentChunk, ...]:
    """
    Fixed-size character windows starting every chunk_size - overlap
    characters. The last chunk may be shorter; an empty document gives no
    chunk.
    """
    if chunk_size < 1 or not 0 <= overlap < chunk_size:
        raise ConfigValidationError(f"Chunking needs 0 <= overlap < chunk_size, got {overlap} and {chunk_size}")
    step = chunk_size - overlap
    chunks: List[DocumentChunk] = []
    start = 0
    while start < len(document):
        end = min(start + chunk_size, len(document))
        chunks.append(DocumentChunk(doc_id, len(chunks), document[start:end], (start, end)))
        if end == len(document):
            break
        start += step
    return tuple(chunks)


def build_index(chunks: Sequence[DocumentChunk], embedder: EmbedderPort) -> RetrievalIndex:
    rows: List[np.ndarray] = []
    for document_chunk in chunks:
        try:
            vector = np.asarray(embedder.embed([document_chunk.text]), dtype=float)[0]
        except Exception as e:
            raise ProviderError(f"Embedding failed for chunk {document_chunk.chunk_id}: {e}") from e
        rows.append(_unit(vector))

    if rows and len({row.shape for row in rows}) != 1:
        raise ProviderError(f"Embedder {embedder.embedder_id} returned vectors of different dimensions")
    vectors = np.vstack(rows) if rows else np.empty((0, 0))
    logger.info("Indexed %d chunks with %s", len(rows), embedder.embedder_id)
    return RetrievalIndex(chunks=tuple(chunks), vectors=vectors, embedder_id=embedder.embedder_id)


def retrieve(
    index: RetrievalIndex,
    query: str,
    k: int,
    embedder: EmbedderPort,
    doc_ids: Optional[Sequence[str]] = None,
) -> Tuple[ChunkMatch, ...]:
    """
    Top-k chunks by cosine similarity with the query, ties broken by
    (doc_id, chunk_index).

    Args:
            index (RetrievalIndex): Chunks and unit vectors.
            query (str): Query text.
            k (int): Number of chunks, all chunks when k exceeds the index size.
            embedder (EmbedderPort): Embedder the index was built with.
            doc_ids (Optional[Sequence[str]]): Restricts the search to these documents when
                any of their chunks is indexed.

    Returns:
            Tuple[ChunkMatch, ...]: Matches by descending score.
    """
    if len(index) == 0:
        raise DataError("Cannot retrieve from an empty index")
    if k < 1:
        raise ConfigValidationError(f"Retrieval needs k >= 1, got {k}")

    query_vector = _unit(np.asarray(embedder.embed([query]), dtype=float)[0])
    scores = index.vectors @ query_vector

    positions = range(len(index))
    if doc_ids is not None:
        wanted = set(doc_ids)
        restricted = [position for position in positions if index.chunks[position].doc_id in wanted]
        if restricted:
            positions = restricted

    ranked = sorted(
        positions,
        key=lambda position: (-scores[position], index.chunks[position].doc_id, index.chunks[position].chunk_index),
    )
    return tuple(ChunkMatch(index.chunks[position], float(scores[position])) for position in ranked[:k])


def parse_score(reply: str) -> int:
    """
    First integer token of the reply. Out-of-range values are rejected, never
    clamped.
    """
    token = _INTEGER_TOKEN.search(reply)
    if token is None:
        raise ScoringError(f"No rating found in provider reply: {reply!r}")
    score = int(token.group())
    if not 1 <= score <= 5:
        raise ScoringError(f"Rating {score} is outside 1..5 in provider reply: {reply!r}")
    return score


def ratings_to_feature(ratings: Sequence[WeatherRating], days: Sequence[date]) -> np.ndarray:
    """
    Broadcast period ratings to days. Days without a rating hold NaN.

    Raises:
            DataError: Two ratings cover the same day.
    """
    by_period: Dict[str, int] = {}
    for rating in ratings:
        if rating.period in by_period:
            raise DataError(f"Two ratings claim the period {rating.period}")
        by_period[rating.period] = rating.score

    values = np.full(len(days), np.nan)
    for row, day in enumerate(days):
        covering = [period for period in (period_of(day, YEARLY), period_of(day, MONTHLY)) if period in by_period]
        if len(covering) > 1:
            raise DataError(f"Overlapping rating periods {' and '.join(covering)} both cover {day}")
        if covering:
            values[row] = by_period[covering[0]]
    return values


class WeatherRatingProvider:
    """
    Scores weather periods by retrieval-augmented prompting.

    Args:
            index (RetrievalIndex): Indexed report chunks.
            embedder (EmbedderPort): Embedder the index was built with.
            provider (RatingProviderPort): Scorer receiving the prompts.
            cache (RatingCachePort): Rating store keyed by period, prompt hash and provider id.
            template (PromptTemplate): Versioned scoring prompt.
            top_k (int): Chunks retrieved per period.
    """

    def __init__(
        self,
        index: RetrievalIndex,
        embedder: EmbedderPort,
        provider: RatingProviderPort,
        cache: RatingCachePort,
        template: PromptTemplate,
        top_k: int = TOP_K_CHUNKS,
    ):
        self.index = index
        self.embedder = embedder
        self.provider = provider
        self.cache = cache
        self.template = template
        self.top_k = top_k

    def cache_key(self, period: str) -> str:
        return f"{period}|{self.template.digest}|{self.provider.provider_id}"

    def build_request(self, period: str) -> Tuple[RatingRequest, Tuple[ChunkMatch, ...]]:
        label = period_label(period)
        question = QUESTION.format(period=label)
        matches = retrieve(self.index, question, self.top_k, self.embedder, doc_ids=(period[:4],))
        context = CONTEXT_SEPARATOR.join(match.chunk.text for match in matches)
        request = RatingRequest(
            period_label=label,
            system=self.template.system,
            user=self.template.render(label, context, question),
            context_chunks=tuple(match.chunk.text for match in matches),
        )
        return request, matches

    def score_weather(self, period: str) -> WeatherRating:
        return self.score_periods((period,))[0]

    def score_periods(self, periods: Sequence[str]) -> Tuple[WeatherRating, ...]:
        """
        Ratings in the order of the periods. Cached periods never reach the
        provider; the others are submitted together so a remote provider can
        overlap the requests. Every valid reply of a batch is cached before
        the replies that fail to parse are reported together.

        Raises:
                ScoringError: Some replies hold no rating in 1..5; the message names their periods.
        """
        ratings: Dict[str, WeatherRating] = {}
        pending: List[Tuple[str, RatingRequest, Tuple[ChunkMatch, ...]]] = []
        for period in dict.fromkeys(periods):
            cached = self.cache.get(self.cache_key(period))
            if cached is not None:
                ratings[period] = cached
            else:
                pending.append((period, *self.build_request(period)))

        if pending:
            logger.info("Scoring %d periods with %s (%d cached)", len(pending), self.provider.provider_id, len(ratings))
            replies = self.provider.complete_many([request for _, request, _ in pending])
            failures: List[str] = []
            for (period, _, matches), reply in zip(pending, replies):
                try:
                    score = parse_score(reply)
                except ScoringError as e:
                    failures.append(f"{period} ({e})")
                    continue
                rating = WeatherRating(
                    period=period,
                    score=score,
                    rationale=reply,
                    top_chunks=tuple(match.chunk.chunk_id for match in matches),
                    provider=self.provider.provider_id,
                )
                self.cache.put(self.cache_key(period), rating)
                ratings[period] = rating
            if failures:
                raise ScoringError(
                    f"{len(failures)} of {len(pending)} replies hold no usable rating: {'; '.join(failures)}"
                )
        return tuple(ratings[period] for period in periods)


def periods_for_days(days: Sequence[date], granularity: str) -> Tuple[str, ...]:
    return tuple(dict.fromkeys(period_of(day, granularity) for day in days))


# PRIVATE FUNCTIONS
def _unit(vector: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vector))
    return vector / norm if norm > 0 else vector
