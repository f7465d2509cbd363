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

import asyncio
import logging
import os
from typing import Any, Dict, Sequence, Tuple

import aiohttp

from src.domain.errors import ProviderError, TransportError
from src.domain.weather.rating_provider_port import RatingProviderPort
from src.domain.weather.weather_data_objects import ProviderConfig, RatingRequest

logger = logging.getLogger(__name__)

RETRY_STATUSES = (429, 500, 502, 503, 504)
RETRY_BASE_DELAY = 0.5


class RemoteChatProvider(RatingProviderPort):
    """
    Chat-completion endpoint reached over HTTP. Requests of one batch run
    concurrently, at most `parallelism` at a time, each retried with
    exponential backoff on transport failures and throttling statuses.

    Args:
            config (ProviderConfig): Endpoint, model, token variable, timeout, retries and parallelism.
    """

    def __init__(self, config: ProviderConfig):
        self.config = config

    @property
    def provider_id(self) -> str:
        return f"remote-{self.config.model}"

    def complete(self, request: RatingRequest) -> str:
        return self.complete_many((request,))[0]

    def complete_many(self, requests: Sequence[RatingRequest]) -> Tuple[str, ...]:
        token = os.getenv(self.config.token_env)
        if not token:
            raise ProviderError(f"Environment variable {self.config.token_env} holds no provider token")
        return asyncio.run(self.__complete_all(requests, token))

    # PRIVATE METHODS
    async def __complete_all(self, requests: Sequence[RatingRequest], token: str) -> Tuple[str, ...]:
        semaphore = asyncio.Semaphore(self.config.parallelism)
        timeout = aiohttp.ClientTimeout(total=self.config.timeout)
        headers = {"Authorization": f"Bearer {token}", "Content-Type": "application/json"}
        async with aiohttp.ClientSession(timeout=timeout, headers=headers) as session:
            replies = await asyncio.gather(*(self.__complete_one(session, semaphore, request) for request in requests))
        return tuple(replies)

    async def __complete_one(
        self, session: aiohttp.ClientSession, semaphore: asyncio.Semaphore, request: RatingRequest
    ) -> str:
        payload = {
            "model": self.config.model,
            "temperature": 0,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
        }
        last_error = "no attempt"
        for attempt in range(self.config.max_retries + 1):
            if attempt:
                await asyncio.sleep(RETRY_BASE_DELAY * 2 ** (attempt - 1))
            async with semaphore:
                try:
                    async with session.post(self.config.endpoint, json=payload) as response:
                        if response.status in RETRY_STATUSES:
                            last_error = f"HTTP {response.status}"
                            logger.warning(
                                "Provider returned %d for %s (attempt %d/%d)",
                                response.status,
                                request.period_label,
                                attempt + 1,
                                self.config.max_retries + 1,
                            )
                            continue
                        if response.status != 200:
                            raise TransportError(
                                f"Provider returned HTTP {response.status} for {request.period_label}: "
                                f"{await response.text()}"
                            )
                        return _reply_text(await response.json())
                except (aiohttp.ClientError, asyncio.TimeoutError) as e:
                    last_error = f"{type(e).__name__}: {e}"
                    logger.warning("Provider request for %s failed: %s", request.period_label, last_error)
        raise TransportError(
            f"Provider request for {request.period_label} failed after "
            f"{self.config.max_retries + 1} attempts ({last_error})"
        )


# PRIVATE FUNCTIONS
def _reply_text(payload: Dict[str, Any]) -> str:
    try:
        return str(payload["choices"][0]["message"]["content"])
    except (KeyError, IndexError, TypeError):
        raise TransportError(f"Unexpected provider response: {payload!r}") from None
