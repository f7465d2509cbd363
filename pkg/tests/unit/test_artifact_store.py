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

from datetime import timedelta
from pathlib import Path

import numpy as np
import pytest

from src.domain.errors import DataError
from src.domain.evaluation.evaluation_data_objects import ForecastRecord, RejectionHeatmap
from src.domain.forecasting.ensemble import fit_ensemble, predict_ensemble
from src.domain.forecasting.forecasting_data_objects import EnsembleParams, GbtParams, LstmParams
from src.domain.forecasting.gbt import fit_gbt, predict_gbt
from src.domain.forecasting.har import fit_har, predict_har
from src.domain.pipeline.pipeline_data_objects import ArtifactEntry, RunManifest
from src.domain.realized.realized_data_objects import DailyRealizedMeasures
from src.domain.realized.realized_estimators import transform
from src.domain.weather.weather_data_objects import WeatherRating
from src.infra.data.artifact_store import MANIFEST, FileArtifactStore
from src.infra.data.model_serializer import model_from_document, model_to_document
from tests.unit.helper import START_DAY, har_matrix, matrix_from_columns, synthetic_measures


@pytest.fixture
def store(tmp_path):
    print("[SETUP] Create an artifact store")
    yield FileArtifactStore(Path(tmp_path, "out"))
    print("[TEARDOWN]")


def test_write_measures_Should_round_trip_undefined_values_as_none(store) -> None:
    # Given
    flat_day = transform(
        DailyRealizedMeasures(day=START_DAY, m=48, rv=0.0, bpv=0.0, tpq=0.0, rq=0.0, z=None, jump=0.0, cv=0.0)
    )
    measures = (flat_day,) + synthetic_measures(3)[1:]

    # When
    store.write_measures("measures.csv", measures)
    restored = store.read_measures("measures.csv")

    # Then
    assert restored == measures, f"Actual measures = {restored}"
    assert restored[0].z is None and restored[0].ln_rv is None


def test_write_matrix_Should_keep_columns_mask_and_schema_in_a_sidecar(store) -> None:
    # Given
    matrix = matrix_from_columns({"x1": [1.0, 2.0, 3.0], "x2": [0.5, 0.25, 0.125]}, [1.5, 2.5, np.nan], ("x2",))

    # When
    written = store.write_matrix("features/features.csv", matrix)
    restored = store.read_matrix("features/features.csv")

    # Then
    assert written == ("features/features.csv", "features/features.schema.json"), f"Actual files = {written}"
    assert restored.days == matrix.days and restored.column_names == matrix.column_names
    assert restored.model_features == ("x2",)
    assert np.array_equal(restored.values(("x1", "x2"), np.arange(3)), matrix.values(("x1", "x2"), np.arange(3)))
    assert restored.mask.tolist() == [True, True, False], f"Actual mask = {restored.mask}"
    assert np.isnan(restored.target[2]) and restored.target[0] == 1.5


def test_read_matrix_Should_fail_When_a_schema_column_is_missing(store) -> None:
    # Given
    matrix = matrix_from_columns({"x1": [1.0, 2.0]}, [1.0, 2.0])
    store.write_matrix("features.csv", matrix)
    store.write_text("features.csv", "date,RV_next,usable\n2010-01-01,1.0,1\n")

    # When / Then
    with pytest.raises(DataError):
        store.read_matrix("features.csv")


def test_write_records_Should_round_trip_forecasts(store) -> None:
    # Given
    records = tuple(
        ForecastRecord(START_DAY + timedelta(days=offset), model, 0.1 * offset + 1.0 / 3.0, 1.0 + offset)
        for offset in range(3)
        for model in ("FAEP", "HAR-CJ")
    )

    # When
    store.write_records("forecasts.csv", records)

    # Then
    assert store.read_records("forecasts.csv") == records


def test_write_ratings_Should_write_one_json_line_per_period(store) -> None:
    # Given
    ratings = (
        WeatherRating("2010-01", 5, "Rating: 5 - heatwave", ("2010#0",), "offline-abc"),
        WeatherRating("2010-02", 1, "Rating: 1 - no severity keyword", (), "offline-abc"),
    )

    # When
    store.write_ratings("ratings.jsonl", ratings)

    # Then
    assert store.read_ratings("ratings.jsonl") == ratings
    assert len(store.path("ratings.jsonl").read_text().splitlines()) == 2


def test_write_document_Should_write_non_finite_floats_as_null_and_give_stable_digests(store) -> None:
    # Given
    document = {"mae": float("nan"), "values": np.array([1.0, np.inf]), "n": np.int64(3)}

    # When
    store.write_document("metrics.json", document)
    first = store.digest("metrics.json")
    store.write_document("metrics.json", document)

    # Then
    assert store.read_document("metrics.json") == {"mae": None, "values": [1.0, None], "n": 3}
    assert store.digest("metrics.json") == first
    with pytest.raises(DataError):
        store.digest("missing.json")


def test_write_heatmap_Should_start_with_a_comment_header(store) -> None:
    # Given
    heatmap = RejectionHeatmap(
        ("FAEP", "HAR-CJ"), np.array([[0, 2], [0, 0]]), segments=2, segment_size=25, significance=0.1
    )

    # When
    store.write_heatmap("dm_heatmap.csv", heatmap)

    # Then
    lines = store.path("dm_heatmap.csv").read_text().splitlines()
    assert lines[0] == "# segments=2 segment_size=25 alpha=0.1", f"Actual header = {lines[0]}"
    assert lines[1] == "model,FAEP,HAR-CJ" and lines[2] == "FAEP,0,2", f"Actual lines = {lines}"


def test_read_manifest_Should_round_trip_and_ignore_an_unreadable_file(store) -> None:
    # Given
    manifest = RunManifest(
        config_hash="abc",
        artifacts=(ArtifactEntry("measures.csv", "00", "measures"),),
        stage_timings={"measures": 0.25},
        versions={"faep": "0.1.0"},
        seed=7,
        created_at="2026-01-01T00:00:00",
    )

    # When / Then
    assert store.read_manifest() is None
    store.write_manifest(manifest)
    assert store.read_manifest() == manifest
    store.write_text(MANIFEST, '{"config_hash": "abc"}\n')
    assert store.read_manifest() is None


def test_write_model_Should_restore_models_that_predict_identically(store) -> None:
    # Given
    matrix = har_matrix(200)
    rows = np.flatnonzero(matrix.mask)
    har = fit_har(matrix, rows=rows[:150])
    rng = np.random.default_rng(0)
    x = rng.standard_normal((80, 2))
    gbt = fit_gbt(x, x[:, 0] ** 2, GbtParams(n_rounds=10, max_depth=2), ("a", "b"))

    # When
    store.write_model("models/har.json", har)
    store.write_model("models/gbt.json", gbt)

    # Then
    restored_har = store.read_model("models/har.json")
    assert np.allclose(predict_har(restored_har, matrix, rows[150:]), predict_har(har, matrix, rows[150:]))
    assert np.allclose(predict_gbt(store.read_model("models/gbt.json"), x), predict_gbt(gbt, x))


def test_model_from_document_Should_restore_an_ensemble_with_both_submodels() -> None:
    # Given
    rng = np.random.default_rng(1)
    x1, x2 = rng.standard_normal(130), rng.standard_normal(130)
    matrix = matrix_from_columns({"x1": x1, "x2": x2}, x1 + 0.3 * x2**2)
    params = EnsembleParams(
        gbt=GbtParams(n_rounds=10, max_depth=2),
        lstm=LstmParams(hidden_size=3, sequence_length=3, batch_size=16, epochs=3, patience=3),
    )
    model = fit_ensemble(matrix, np.arange(90), np.arange(90, 120), params)

    # When
    restored = model_from_document(model_to_document(model))

    # Then
    rows = np.arange(120, 130)
    assert (restored.omega1, restored.omega2) == (model.omega1, model.omega2)
    assert np.allclose(predict_ensemble(restored, matrix, rows), predict_ensemble(model, matrix, rows))


def test_model_from_document_Should_reject_unknown_versions_and_kinds() -> None:
    # When / Then
    with pytest.raises(DataError):
        model_from_document({"format_version": 99, "kind": "har"})
    with pytest.raises(DataError):
        model_from_document({"format_version": 1, "kind": "forest"})
