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

from os import getenv, makedirs
from pathlib import Path

"""
Module for environment variables and initialization.

"""

CACHE_PATH = Path(getenv("XDG_CACHE_HOME", Path(Path.home(), ".cache")), "faep")
RATING_CACHE_FILE = Path(CACHE_PATH, "ratings_cache.jsonl")
LOG_FILE = Path(CACHE_PATH, "faep.log")
PROMPT_TEMPLATE_FILE = Path(Path(__file__).resolve().parent, "assets", "weather_prompt_v1.txt")


def init_env() -> None:
    init_cache_path()
    init_log_file()


def init_cache_path() -> None:
    makedirs(CACHE_PATH, exist_ok=True)


def init_log_file() -> None:
    if not LOG_FILE.exists():
        LOG_FILE.touch()
