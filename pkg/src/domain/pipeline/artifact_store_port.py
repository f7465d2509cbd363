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

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Optional, Sequence, Tuple

from src.domain.evaluation.evaluation_data_objects import ForecastRecord, RejectionHeatmap
from src.domain.features.feature_data_objects import FeatureMatrix
from src.domain.pipeline.pipeline_data_objects import RunManifest
from src.domain.realized.realized_data_objects import DailyRealizedMeasures
from src.domain.weather.weather_data_objects import WeatherRating


class ArtifactStorePort(ABC):
    """
    This port persists the intermediates of a run under one output directory.
    Artifact names are paths relative to that directory.
    """

    @property
    @abstractmethod
    def root(self) -> Path:
        pass

    @abstractmethod
    def path(self, name: str) -> Path:
        """
        Absolute location of an artifact, parent directories created.
        """
        pass

    @abstractmethod
    def exists(self, name: str) -> bool:
        pass

    @abstractmethod
    def digest(self, name: str) -> str:
        """
        Returns:
            str: SHA-256 hex digest of the artifact bytes.
        """
        pass

    @abstractmethod
    def write_document(self, name: str, document: Any) -> str:
        """
        Write a JSON document. NaN and infinite floats are written as null.
        """
        pass

    @abstractmethod
    def read_document(self, name: str) -> Any:
        pass

    @abstractmethod
    def write_text(self, name: str, text: str) -> str:
        pass

    @abstractmethod
    def write_measures(self, name: str, measures: Sequence[DailyRealizedMeasures]) -> str:
        pass

    @abstractmethod
    def read_measures(self, name: str) -> Tuple[DailyRealizedMeasures, ...]:
        pass

    @abstractmethod
    def write_ratings(self, name: str, ratings: Sequence[WeatherRating]) -> str:
        pass

    @abstractmethod
    def read_ratings(self, name: str) -> Tuple[WeatherRating, ...]:
        pass

    @abstractmethod
    def write_matrix(self, name: str, matrix: FeatureMatrix) -> Tuple[str, ...]:
        """
        Write the matrix values, target and mask, with a sidecar describing
        column units, groups and the model features.

        Returns:
            Tuple[str, ...]: Names of the table and of its sidecar.
        """
        pass

    @abstractmethod
    def read_matrix(self, name: str) -> FeatureMatrix:
        pass

    @abstractmethod
    def write_model(self, name: str, model: Any) -> str:
        pass

    @abstractmethod
    def read_model(self, name: str) -> Any:
        pass

    @abstractmethod
    def write_records(self, name: str, records: Sequence[ForecastRecord]) -> str:
        pass

    @abstractmethod
    def read_records(self, name: str) -> Tuple[ForecastRecord, ...]:
        pass

    @abstractmethod
    def write_heatmap(self, name: str, heatmap: RejectionHeatmap) -> str:
        pass

    @abstractmethod
    def write_manifest(self, manifest: RunManifest) -> str:
        pass

    @abstractmethod
    def read_manifest(self) -> Optional[RunManifest]:
        pass
