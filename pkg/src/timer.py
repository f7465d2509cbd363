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

import time
from typing import Dict, Optional


class StageTimer:
    """
    Measures the wall-clock duration of a pipeline stage and stores it, in
    seconds, in a shared timings dictionary keyed by stage name.

    Usage:
        with StageTimer("measures", timings):
            ...
    """

    def __init__(self, stage: str, timings: Dict[str, float]) -> None:
        self.stage = stage
        self.timings = timings
        self._starting_time: Optional[float] = None

    def __enter__(self) -> "StageTimer":
        self._starting_time = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_value, traceback) -> None:
        self.timings[self.stage] = self.elapsed

    @property
    def elapsed(self) -> float:
        if self._starting_time is None:
            return 0.0
        return time.perf_counter() - self._starting_time
