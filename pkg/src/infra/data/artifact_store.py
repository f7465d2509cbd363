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
import json
import logging
import math
from datetime import date
from pathlib import Path
from typing import Any, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.domain.errors import DataError
from src.domain.evaluation.evaluation_data_objects import ForecastRecord, RejectionHeatmap
from src.domain.features.feature_data_objects import FeatureColumn, FeatureMatrix
from src.domain.pipeline.artifact_store_port import ArtifactStorePort
from src.domain.pipeline.pipeline_data_objects import RunManifest
from src.domain.realized.realized_data_objects import MEASURE_COLUMNS, DailyRealizedMeasures
from src.domain.weather.weather_data_objects import WeatherRating
from src.infra.data.model_serializer import model_from_document, model_to_document

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"
USABLE_COLUMN = "usable"

# Measure columns that may be undefined for a day
OPTIONAL_MEASURES = ("z", "ln_rv", "ln_j1p", "ln_cv", "sqrt_rv", "sqrt_j", "sqrt_cv")


class FileArtifactStore(ArtifactStorePort):
    """
    Artifact store on the local file system: tables as CSV, documents as
    indented JSON, ratings as JSON lines. Floats are written with their
    shortest round-trip representation so identical runs give identical bytes.
    """

    def __init__(self, root: Path):
        self.__root = Path(root)
        self.__root.mkdir(parents=True, exist_ok=True)

    @property
    def root(self) -> Path:
        return self.__root

    def path(self, name: str) -> Path:
        location = Path(self.__root, name)
        location.parent.mkdir(parents=True, exist_ok=True)
        return location

    def exists(self, name: str) -> bool:
        return Path(self.__root, name).is_file()

    def digest(self, name: str) -> str:
        location = Path(self.__root, name)
        if not location.is_file():
            raise DataError(f"Artifact not found: {location}")
        return hashlib.sha256(location.read_bytes()).hexdigest()

    def write_document(self, name: str, document: Any) -> str:
        text = json.dumps(_json_safe(document), indent=2, sort_keys=True, allow_nan=False)
        return self.write_text(name, text + "\n")

    def read_document(self, name: str) -> Any:
        return json.loads(self.__read_text(name))

    def write_text(self, name: str, text: str) -> str:
        with open(self.path(name), "w", encoding="utf-8", newline="\n") as file:
            file.write(text)
        return name

    def write_measures(self, name: str, measures: Sequence[DailyRealizedMeasures]) -> str:
        frame = pd.DataFrame([measure.to_row() for measure in measures], columns=list(MEASURE_COLUMNS))
        return self.__write_frame(name, frame)

    def read_measures(self, name: str) -> Tuple[DailyRealizedMeasures, ...]:
        frame = self.__read_frame(name)
        missing = [column for column in MEASURE_COLUMNS if column not in frame.columns]
        if missing:
            raise DataError(f"Measures table {name} lacks columns: {', '.join(missing)}")
        measures = []
        for row in frame.to_dict("records"):
            values = {column: row[column] for column in MEASURE_COLUMNS if column not in ("date", "m")}
            for column in OPTIONAL_MEASURES:
                values[column] = None if pd.isna(values[column]) else float(values[column])
            measures.append(
                DailyRealizedMeasures(
                    day=date.fromisoformat(str(row["date"])),
                    m=int(row["m"]),
                    **{column: value if column in OPTIONAL_MEASURES else float(value) for column, value in values.items()},
                )
            )
        return tuple(measures)

    def write_ratings(self, name: str, ratings: Sequence[WeatherRating]) -> str:
        lines = [json.dumps(rating.to_document(), sort_keys=True) for rating in ratings]
        return self.write_text(name, "".join(line + "\n" for line in lines))

    def read_ratings(self, name: str) -> Tuple[WeatherRating, ...]:
        return tuple(
            WeatherRating.from_document(json.loads(line)) for line in self.__read_text(name).splitlines() if line.strip()
        )

    def write_matrix(self, name: str, matrix: FeatureMatrix) -> Tuple[str, ...]:
        columns = {"date": [day.isoformat() for day in matrix.days]}
        columns.update({column.name: column.values for column in matrix.columns})
        columns[matrix.target_name] = matrix.target
        columns[USABLE_COLUMN] = matrix.mask.astype(int)
        self.__write_frame(name, pd.DataFrame(columns))

        sidecar = _sidecar_name(name)
        self.write_document(
            sidecar,
            {
                "target_name": matrix.target_name,
                "model_features": list(matrix.model_features),
                "columns": [
                    {"name": column.name, "unit": column.unit, "group": column.group} for column in matrix.columns
                ],
            },
        )
        return name, sidecar

    def read_matrix(self, name: str) -> FeatureMatrix:
        schema = self.read_document(_sidecar_name(name))
        frame = self.__read_frame(name)
        expected = ["date"] + [column["name"] for column in schema["columns"]] + [schema["target_name"], USABLE_COLUMN]
        missing = [column for column in expected if column not in frame.columns]
        if missing:
            raise DataError(f"Feature matrix {name} lacks columns: {', '.join(missing)}")
        return FeatureMatrix(
            days=tuple(date.fromisoformat(str(day)) for day in frame["date"]),
            columns=tuple(
                FeatureColumn(
                    name=column["name"],
                    values=frame[column["name"]].to_numpy(dtype=float),
                    unit=column["unit"],
                    group=column["group"],
                )
                for column in schema["columns"]
            ),
            target=frame[schema["target_name"]].to_numpy(dtype=float),
            target_name=schema["target_name"],
            mask=frame[USABLE_COLUMN].to_numpy(dtype=int).astype(bool),
            model_features=tuple(schema["model_features"]),
        )

    def write_model(self, name: str, model: Any) -> str:
        return self.write_document(name, model_to_document(model))

    def read_model(self, name: str) -> Any:
        return model_from_document(self.read_document(name))

    def write_records(self, name: str, records: Sequence[ForecastRecord]) -> str:
        frame = pd.DataFrame(
            {
                "date": [record.day.isoformat() for record in records],
                "model": [record.model for record in records],
                "prediction": [record.prediction for record in records],
                "actual": [record.actual for record in records],
            }
        )
        return self.__write_frame(name, frame)

    def read_records(self, name: str) -> Tuple[ForecastRecord, ...]:
        frame = self.__read_frame(name, dtype={"model": str})
        return tuple(
            ForecastRecord(
                day=date.fromisoformat(str(row["date"])),
                model=row["model"],
                prediction=float(row["prediction"]),
                actual=float(row["actual"]),
            )
            for row in frame.to_dict("records")
        )

    def write_heatmap(self, name: str, heatmap: RejectionHeatmap) -> str:
        frame = pd.DataFrame(heatmap.counts, index=list(heatmap.models), columns=list(heatmap.models))
        frame.index.name = "model"
        with open(self.path(name), "w", encoding="utf-8", newline="\n") as file:
            file.write(f"# segments={heatmap.segments} segment_size={heatmap.segment_size} alpha={heatmap.significance}\n")
            frame.to_csv(file, lineterminator="\n")
        return name

    def write_manifest(self, manifest: RunManifest) -> str:
        return self.write_document(MANIFEST, manifest.to_document())

    def read_manifest(self) -> Optional[RunManifest]:
        if not self.exists(MANIFEST):
            return None
        try:
            return RunManifest.from_document(self.read_document(MANIFEST))
        except (KeyError, TypeError, ValueError) as e:
            logger.warning("Ignoring unreadable manifest in %s: %s", self.__root, e)
            return None

    # PRIVATE METHODS
    def __write_frame(self, name: str, frame: pd.DataFrame) -> str:
        frame.to_csv(self.path(name), index=False, lineterminator="\n")
        return name

    def __read_frame(self, name: str, dtype: Optional[dict] = None) -> pd.DataFrame:
        location = Path(self.__root, name)
        if not location.is_file():
            raise DataError(f"Artifact not found: {location}")
        return pd.read_csv(location, float_precision="round_trip", dtype=dtype)

    def __read_text(self, name: str) -> str:
        location = Path(self.__root, name)
        if not location.is_file():
            raise DataError(f"Artifact not found: {location}")
        return location.read_text(encoding="utf-8")


# PRIVATE FUNCTIONS
def _sidecar_name(name: str) -> str:
    return str(Path(name).with_suffix(".schema.json"))


def _json_safe(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(key): _json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(item) for item in value]
    if isinstance(value, np.ndarray):
        return _json_safe(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    if isinstance(value, date):
        return value.isoformat()
    if isinstance(value, Path):
        return str(value)
    return value
