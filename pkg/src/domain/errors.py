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

from typing import Any, Dict, Optional, Tuple

from src.config import ExitCode

"""
Error families raised by the domain. Each family carries the process exit code
the CLI reports when the error reaches main().
"""


class FaepError(Exception):
    exit_code: ExitCode = ExitCode.FAILURE


class ConfigValidationError(FaepError, ValueError):
    exit_code = ExitCode.CONFIG_ERROR


class DataError(FaepError, ValueError):
    exit_code = ExitCode.DATA_ERROR


class ParseError(DataError):
    def __init__(self, row_number: int, message: str) -> None:
        super().__init__(f"Row {row_number}: {message}")
        self.row_number = row_number


class ConflictError(DataError):
    pass


class PartialDayError(DataError):
    pass


class UnrecoverableDataError(DataError):
    pass


class SchemaMismatchError(DataError):
    def __init__(self, missing: Tuple[str, ...], message: str = "Input schema does not match fit-time schema") -> None:
        super().__init__(f"{message}, missing columns: {', '.join(missing)}")
        self.missing = missing


class ModelFitError(FaepError, RuntimeError):
    exit_code = ExitCode.MODEL_FIT_ERROR


class RankDeficientError(ModelFitError):
    def __init__(self, collinear: Tuple[str, ...]) -> None:
        super().__init__(f"Rank-deficient design, collinear columns: {', '.join(collinear)}")
        self.collinear = collinear


class NonConvergenceError(ModelFitError):
    def __init__(self, message: str, best_parameters: Dict[str, float]) -> None:
        super().__init__(f"{message} (best so far: {best_parameters})")
        self.best_parameters = best_parameters


class NonFiniteLossError(ModelFitError):
    def __init__(self, epoch: int, diagnostics: Dict[str, Any]) -> None:
        super().__init__(f"Non-finite loss at epoch {epoch}: {diagnostics}")
        self.epoch = epoch
        self.diagnostics = diagnostics


class ProviderError(FaepError, RuntimeError):
    exit_code = ExitCode.PROVIDER_ERROR


class ScoringError(ProviderError):
    pass


class TransportError(ProviderError):
    pass


class StageError(FaepError):
    """
    Wraps an error raised while a pipeline stage was running, keeping the exit
    code of the original error.
    """

    def __init__(self, stage: str, cause: FaepError, last_good_artifact: Optional[str]) -> None:
        pointer = last_good_artifact if last_good_artifact is not None else "none"
        super().__init__(f"Stage '{stage}' failed: {cause} (last good artifact: {pointer})")
        self.stage = stage
        self.cause = cause
        self.last_good_artifact = last_good_artifact
        self.exit_code = cause.exit_code
