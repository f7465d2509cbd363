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
from typing import List

from src.domain.errors import ConfigValidationError
from src.domain.pipeline.pipeline_data_objects import PipelineConfig
from src.domain.weather.embedder_port import EmbedderPort
from src.domain.weather.rating_provider_port import RatingProviderPort
from src.domain.weather.weather_data_objects import OFFLINE_PROVIDER, DocumentChunk
from src.domain.weather.weather_rating_provider import WeatherRatingProvider, build_index, chunk
from src.environment import RATING_CACHE_FILE
from src.infra.weather.file_corpus_adapter import FileCorpusAdapter
from src.infra.weather.hashed_ngram_embedder import HashedNgramEmbedder
from src.infra.weather.jsonl_rating_cache import JsonlRatingCache
from src.infra.weather.offline_rule_provider import OfflineRuleProvider
from src.infra.weather.prompt_template_loader import load_prompt_template
from src.infra.weather.remote_chat_provider import RemoteChatProvider
from src.infra.weather.transformer_embedder import TransformerEmbedder

logger = logging.getLogger(__name__)


def build_weather_rater(config: PipelineConfig) -> WeatherRatingProvider:
    """
    Index the configured corpus and wire the scorer, the cache and the
    prompt template of a run.
    """
    if config.data.corpus is None:
        raise ConfigValidationError("Weather rating needs [data] corpus")
    documents = FileCorpusAdapter().read_documents(config.data.corpus)
    chunks: List[DocumentChunk] = []
    for doc_id, text in documents.items():
        chunks.extend(chunk(text, config.rating.chunk_size, config.rating.overlap, doc_id=doc_id))

    embedder = build_embedder(config.rating.embedder)
    return WeatherRatingProvider(
        index=build_index(chunks, embedder),
        embedder=embedder,
        provider=build_rating_provider(config),
        cache=JsonlRatingCache(config.provider.cache_file or RATING_CACHE_FILE),
        template=load_prompt_template(),
        top_k=config.rating.top_k,
    )


def build_embedder(kind: str) -> EmbedderPort:
    return TransformerEmbedder() if kind == "transformer" else HashedNgramEmbedder()


def build_rating_provider(config: PipelineConfig) -> RatingProviderPort:
    if config.provider.kind == OFFLINE_PROVIDER:
        if config.provider.rule_table is None:
            raise ConfigValidationError("The offline provider needs [data] rule_table")
        return OfflineRuleProvider(config.provider.rule_table)
    return RemoteChatProvider(config.provider)
