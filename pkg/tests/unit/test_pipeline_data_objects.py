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
from datetime import date
from pathlib import Path

import pytest

from src.domain.errors import ConfigValidationError
from src.domain.features.feature_data_objects import PRICE_FLUCTUATIONS_GROUP, RATING_GROUP, WEATHER_GROUP
from src.domain.pipeline.pipeline_data_objects import (
    AblationToggles,
    ArtifactEntry,
    DataPaths,
    PipelineConfig,
    RunManifest,
    SplitConfig,
)
from src.domain.weather.weather_data_objects import ProviderConfig
from src.timer import StageTimer

CONFIG = PipelineConfig(data=DataPaths(prices=Path("prices.csv")))


def test_config_hash_Should_ignore_the_output_directory_only() -> None:
    # Given
    moved = CONFIG.with_overrides(out_dir=Path("elsewhere"))
    reseeded = CONFIG.with_overrides(seed=3)

    # When / Then
    assert moved.config_hash == CONFIG.config_hash
    assert reseeded.config_hash != CONFIG.config_hash
    assert len(CONFIG.config_hash) == 64


def test_with_overrides_Should_force_the_offline_provider() -> None:
    # Given
    remote = PipelineConfig(
        data=DataPaths(prices=Path("prices.csv")), provider=ProviderConfig(kind="remote", endpoint="http://x")
    )

    # When
    offline = remote.with_overrides(offline=True)

    # Then
    assert offline.provider.kind == "offline" and offline.provider.endpoint == "http://x"
    assert remote.provider.kind == "remote"


def test_ensemble_params_Should_seed_both_submodels_and_follow_the_toggles() -> None:
    # Given
    config = PipelineConfig(data=DataPaths(prices=Path("prices.csv")), toggles=AblationToggles(lstm=False), seed=11)

    # When
    params = config.ensemble_params()

    # Then
    assert params.gbt.seed == 11 and params.lstm.seed == 11
    assert params.use_gbt and not params.use_lstm


def test_ablation_toggles_Should_map_toggles_to_disabled_groups() -> None:
    # Given
    toggles = AblationToggles()

    # When / Then
    assert toggles.disabled_groups() == frozenset()
    assert toggles.without("weather").disabled_groups() == frozenset({WEATHER_GROUP})
    assert toggles.without("price_fluctuations").disabled_groups() == frozenset({PRICE_FLUCTUATIONS_GROUP})
    assert RATING_GROUP in toggles.without("llm_features").disabled_groups()
    with pytest.raises(ConfigValidationError):
        toggles.without("sunspots")
    with pytest.raises(ConfigValidationError):
        toggles.without("lstm").without("gbt")


def test_split_config_Should_require_strictly_ordered_dates() -> None:
    # When / Then
    with pytest.raises(ConfigValidationError):
        SplitConfig(train_end=date(2016, 6, 30), validation_end=date(2016, 6, 30))
    with pytest.raises(ConfigValidationError):
        SplitConfig(train_end=date(2016, 6, 30), validation_end=date(2017, 6, 30), test_end=date(2017, 1, 1))


def test_run_manifest_Should_list_each_artifact_once_and_round_trip_as_a_document() -> None:
    # Given
    manifest = RunManifest(
        config_hash="abc",
        artifacts=(ArtifactEntry("measures.csv", "00", "measures"), ArtifactEntry("ratings.jsonl", "11", "rate")),
        stage_timings={"measures": 0.5},
        versions={"faep": "0.1.0"},
        seed=0,
        created_at="2026-01-01T00:00:00",
    )

    # When
    restored = RunManifest.from_document(manifest.to_document())

    # Then
    assert restored == manifest, f"Actual manifest = {restored}"
    assert [artifact.path for artifact in manifest.artifacts_of("rate")] == ["ratings.jsonl"]
    with pytest.raises(ConfigValidationError):
        RunManifest("abc", (ArtifactEntry("a", "0", "fit"), ArtifactEntry("a", "1", "fit")), {}, {}, 0, "")


def test_stage_timer_Should_store_the_stage_duration() -> None:
    # Given
    timings = {}

    # When
    with StageTimer("features", timings):
        time.sleep(0.01)

    # Then
    assert timings["features"] >= 0.01, f"Actual timings = {timings}"
