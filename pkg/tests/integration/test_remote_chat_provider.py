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
import socket
import threading

import pytest
from aiohttp import web

from src.domain.errors import TransportError
from src.domain.weather.weather_data_objects import ProviderConfig, RatingRequest
from src.infra.weather.remote_chat_provider import RemoteChatProvider

ENDPOINT_PATH = "/v1/chat/completions"


def free_port() -> int:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as listener:
        listener.bind(("127.0.0.1", 0))
        return listener.getsockname()[1]


@pytest.fixture
def chat_server():
    """
    Chat endpoint answering with the statuses queued in `responses` (one 503
    by default), then with a rating reply.
    """
    print("[SETUP] Start the chat endpoint")
    calls = []
    responses = [503]

    async def handler(request: web.Request) -> web.Response:
        calls.append({"authorization": request.headers.get("Authorization"), "payload": await request.json()})
        status = responses.pop(0) if responses else 200
        if status != 200:
            return web.Response(status=status, text="busy")
        return web.json_response({"choices": [{"message": {"content": "Rating: 3 - warm spell"}}]})

    loop = asyncio.new_event_loop()
    app = web.Application()
    app.router.add_post(ENDPOINT_PATH, handler)
    runner = web.AppRunner(app)
    loop.run_until_complete(runner.setup())
    port = free_port()
    loop.run_until_complete(web.TCPSite(runner, "127.0.0.1", port).start())
    thread = threading.Thread(target=loop.run_forever, daemon=True)
    thread.start()

    yield f"http://127.0.0.1:{port}{ENDPOINT_PATH}", calls, responses

    print("[TEARDOWN] Stop the chat endpoint")
    loop.call_soon_threadsafe(loop.stop)
    thread.join()
    loop.run_until_complete(runner.cleanup())
    loop.close()


def rating_request(label: str) -> RatingRequest:
    return RatingRequest(period_label=label, system="You rate weather.", user=f"Rate {label}", context_chunks=())


def test_complete_many_Should_retry_a_throttled_request_and_keep_request_order(chat_server, monkeypatch) -> None:
    # Given
    endpoint, calls, _ = chat_server
    monkeypatch.setenv("FAEP_PROVIDER_TOKEN", "secret-token")
    provider = RemoteChatProvider(ProviderConfig(kind="remote", endpoint=endpoint, max_retries=2, parallelism=1))

    # When
    replies = provider.complete_many((rating_request("January 2010"), rating_request("February 2010")))

    # Then
    assert replies == ("Rating: 3 - warm spell", "Rating: 3 - warm spell"), f"Actual replies = {replies}"
    assert len(calls) == 3, f"Actual calls = {len(calls)}"
    assert all(call["authorization"] == "Bearer secret-token" for call in calls)
    assert calls[-1]["payload"]["temperature"] == 0
    assert calls[-1]["payload"]["messages"][0] == {"role": "system", "content": "You rate weather."}


def test_complete_Should_raise_a_transport_error_once_retries_are_exhausted(chat_server, monkeypatch) -> None:
    # Given
    endpoint, calls, responses = chat_server
    responses.extend([503, 503])
    monkeypatch.setenv("FAEP_PROVIDER_TOKEN", "secret-token")
    provider = RemoteChatProvider(ProviderConfig(kind="remote", endpoint=endpoint, max_retries=1))

    # When / Then
    with pytest.raises(TransportError):
        provider.complete(rating_request("March 2010"))
    assert len(calls) == 2, f"Actual calls = {len(calls)}"


def test_complete_Should_not_retry_a_client_error(chat_server, monkeypatch) -> None:
    # Given
    endpoint, calls, responses = chat_server
    responses[:] = [400]
    monkeypatch.setenv("FAEP_PROVIDER_TOKEN", "secret-token")
    provider = RemoteChatProvider(ProviderConfig(kind="remote", endpoint=endpoint, max_retries=3))

    # When / Then
    with pytest.raises(TransportError):
        provider.complete(rating_request("April 2010"))
    assert len(calls) == 1, f"Actual calls = {len(calls)}"
