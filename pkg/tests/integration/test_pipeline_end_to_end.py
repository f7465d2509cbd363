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

import dataclasses
import json
from pathlib import Path

import numpy as np
import pytest
from freezegun import freeze_time

from src.config import ExitCode
from src.domain.errors import StageError
from src.domain.forecasting.ensemble import predict_ensemble, submodel_predictions
from src.domain.forecasting.forecasters import ENSEMBLE_LABEL, GARCH_LABEL
from src.domain.pipeline.pipeline_data_objects import GROUP_TOGGLES
from src.domain.pipeline.pipeline_runner import (
    ABLATION_DIR,
    ABLATION_REPORT,
    FORECASTS,
    METRICS,
    RATINGS,
    RESUMABLE_STAGES,
    split_rows,
)
from src.infra.cli import cli_adapter
from src.infra.cli.cli_adapter import build_runner
from src.infra.cli.cli_logging import setup_logging
from src.infra.config.toml_config_loader import load_config
from src.infra.synthetic.fixture_generator import generate_fixture
from src.main import main

FIXTURE_DAYS = 240
DEFAULT_FIXTURE_DAYS = 400

# Every file a full run of the default fixture emits, by artifact kind
RUN_ARTIFACTS = {
    "cleaned panel": ("cleaned_prices.csv", "cleaning_report.json"),
    "measures": ("measures.csv", "measures_summary.json"),
    "ratings": ("ratings.jsonl",),
    "feature matrix": ("feature_matrix.csv", "feature_matrix.schema.json", "feature_reduction.json"),
    "models": ("models/har_cj.json", "models/harq_cj_lev.json", "models/garch.json", "models/faep.json"),
    "forecasts": ("forecasts.csv",),
    "metrics": ("metrics.json", "metrics.txt"),
    "dm reports": ("dm_tests.json", "dm_heatmap.csv"),
    "plots": (
        "plots/forecast_har_cj.svg",
        "plots/forecast_harq_cj_lev.svg",
        "plots/forecast_garch.svg",
        "plots/forecast_faep.svg",
        "plots/dm_heatmap.svg",
    ),
}


@pytest.fixture
def fixture_config(tmp_path):
    """
    Synthetic data set with a lighter LSTM so a full run stays short.
    """
    print("[SETUP] Generate a synthetic fixture")
    paths = generate_fixture(Path(tmp_path, "fixture"), days=FIXTURE_DAYS, seed=3)
    config = load_config(paths.config)
    models = dataclasses.replace(config.models, lstm=dataclasses.replace(config.models.lstm, epochs=4, patience=4))
    yield dataclasses.replace(config, models=models), paths
    print("[TEARDOWN]")


@pytest.fixture(scope="module")
def default_run(tmp_path_factory):
    """
    One full run and one ablation of every feature group on the default
    400-day fixture, shared by the tests reading their outcome.
    """
    print("[SETUP] Run and ablate the default synthetic fixture")
    directory = tmp_path_factory.mktemp("default")
    paths = generate_fixture(Path(directory, "fixture"), days=DEFAULT_FIXTURE_DAYS, seed=0)
    config = load_config(paths.config).with_overrides(out_dir=Path(directory, "out"))
    runner = build_runner(config)
    manifest = runner.run()
    rows = build_runner(config, resume=True).ablate(GROUP_TOGGLES)
    yield runner, manifest, rows
    print("[TEARDOWN]")


@pytest.fixture
def quiet_cli(tmp_path, mocker):
    print("[SETUP] Keep the CLI cache and log file under tmp_path")
    mocker.patch("src.main.init_env")
    log_file = Path(tmp_path, "faep.log")
    mocker.patch.object(cli_adapter, "setup_logging", lambda verbose=False: setup_logging(verbose, log_file))
    yield log_file
    print("[TEARDOWN]")


@pytest.mark.slow
def test_run_Should_write_byte_identical_forecasts_and_metrics_for_the_same_seed(fixture_config, tmp_path) -> None:
    # Given
    config, _ = fixture_config
    first = build_runner(config.with_overrides(out_dir=Path(tmp_path, "first")))
    second = build_runner(config.with_overrides(out_dir=Path(tmp_path, "second")))

    # When
    first_manifest = first.run()
    second_manifest = second.run()

    # Then
    for name in (FORECASTS, METRICS):
        assert Path(tmp_path, "first", name).read_bytes() == Path(tmp_path, "second", name).read_bytes(), (
            f"{name} differs between identical runs"
        )
    assert first_manifest.config_hash == second_manifest.config_hash
    assert [entry.sha256 for entry in first_manifest.artifacts] == [entry.sha256 for entry in second_manifest.artifacts]
    models = {report.model for report in first.state.reports}
    assert {"HAR-CJ", "GARCH", ENSEMBLE_LABEL} <= models, f"Actual models = {models}"
    assert first.state.heatmap is not None and first.state.heatmap.segments >= 1


@pytest.mark.slow
def test_run_Should_only_forecast_days_after_the_validation_split(fixture_config, tmp_path) -> None:
    # Given
    config, _ = fixture_config
    runner = build_runner(config.with_overrides(out_dir=Path(tmp_path, "out")))

    # When
    manifest = runner.run(until="evaluate")

    # Then
    assert all(record.day > config.split.validation_end for record in runner.state.records)
    stages = {entry.stage for entry in manifest.artifacts}
    assert {"ingest", "measures", "rate", "features", "fit", "backtest", "evaluate"} == stages, f"Actual stages = {stages}"
    ratings = [json.loads(line) for line in Path(tmp_path, "out", RATINGS).read_text().splitlines()]
    assert all(1 <= rating["score"] <= 5 for rating in ratings)


@pytest.mark.slow
def test_run_Should_reuse_every_resumable_stage_When_resuming_an_identical_run(fixture_config, tmp_path) -> None:
    # Given
    config, _ = fixture_config
    out_dir = Path(tmp_path, "out")
    build_runner(config.with_overrides(out_dir=out_dir)).run()
    forecasts = Path(out_dir, FORECASTS).read_bytes()

    # When
    manifest = build_runner(config.with_overrides(out_dir=out_dir), resume=True).run()

    # Then
    assert manifest.reused_stages == RESUMABLE_STAGES, f"Actual reused stages = {manifest.reused_stages}"
    assert Path(out_dir, FORECASTS).read_bytes() == forecasts


@pytest.mark.slow
def test_ablate_Should_compare_each_toggle_with_the_full_configuration(fixture_config, tmp_path) -> None:
    # Given
    config, _ = fixture_config
    runner = build_runner(config.with_overrides(out_dir=Path(tmp_path, "out")))

    # When
    rows = runner.ablate(("lstm", "weather"))

    # Then
    assert [row.toggle for row in rows] == ["full", "lstm", "weather"], f"Actual rows = {rows}"
    assert rows[0].delta_mae == 0.0
    for row in rows[1:]:
        assert row.delta_mae == pytest.approx(row.mae - rows[0].mae)
        assert Path(tmp_path, "out", ABLATION_DIR, row.toggle, METRICS).is_file()
    report = json.loads(Path(tmp_path, "out", ABLATION_DIR, ABLATION_REPORT).read_text())
    assert len(report) == 3


def test_main_Should_write_identical_ratings_for_repeated_offline_rate_commands(fixture_config, quiet_cli) -> None:
    # Given
    _, paths = fixture_config
    arguments = ["rate", "--config", str(paths.config), "--offline"]

    # When
    first_code = main(arguments)
    first = Path(paths.config.parent, "faep_out", RATINGS).read_bytes()
    second_code = main(arguments)

    # Then
    assert (first_code, second_code) == (ExitCode.SUCCESS, ExitCode.SUCCESS), f"Actual codes = {first_code}, {second_code}"
    assert Path(paths.config.parent, "faep_out", RATINGS).read_bytes() == first
    assert quiet_cli.read_text(), "The log file should record the stages"


def test_main_Should_exit_with_the_provider_code_When_a_rating_leaves_the_scale(fixture_config, quiet_cli) -> None:
    # Given
    _, paths = fixture_config
    paths.rule_table.write_text("base = 7\n[weights]\nhot = 1\n", encoding="utf-8")

    # When
    code = main(["rate", "--config", str(paths.config), "--out", str(Path(paths.config.parent, "failing"))])

    # Then
    assert code == ExitCode.PROVIDER_ERROR, f"Actual code = {code}"


def test_run_Should_wrap_stage_failures_with_the_last_good_artifact(fixture_config, tmp_path) -> None:
    # Given
    config, paths = fixture_config
    paths.rule_table.write_text("base = 7\n[weights]\nhot = 1\n", encoding="utf-8")
    runner = build_runner(load_config(paths.config).with_overrides(out_dir=Path(tmp_path, "out")))

    # When / Then
    with pytest.raises(StageError) as error:
        runner.run(until="rate")
    assert error.value.stage == "rate" and error.value.exit_code == ExitCode.PROVIDER_ERROR
    assert error.value.last_good_artifact.endswith("measures_summary.json"), (
        f"Actual last good artifact = {error.value.last_good_artifact}"
    )


def test_main_Should_write_a_synthetic_fixture(tmp_path, quiet_cli) -> None:
    # When
    code = main(["synth", "--out", str(Path(tmp_path, "synth")), "--days", "150", "--seed", "1"])

    # Then
    assert code == ExitCode.SUCCESS, f"Actual code = {code}"
    config = load_config(Path(tmp_path, "synth", "faep.toml"))
    assert config.data.prices.is_file() and config.data.corpus.is_dir()


@freeze_time("2026-03-01 12:00:00")
def test_run_Should_stamp_the_manifest_with_the_run_time(fixture_config, tmp_path) -> None:
    # Given
    config, _ = fixture_config
    runner = build_runner(config.with_overrides(out_dir=Path(tmp_path, "out")))

    # When
    manifest = runner.run(until="measures")

    # Then
    assert manifest.created_at == "2026-03-01T12:00:00+00:00", f"Actual created_at = {manifest.created_at}"
    assert set(manifest.stage_timings) == {"ingest", "measures"}
    assert runner.store.read_manifest() == manifest


@pytest.mark.slow
def test_run_Should_list_every_artifact_once_in_the_manifest_of_the_default_fixture(default_run) -> None:
    # Given
    _, manifest, _ = default_run

    # When
    paths = [entry.path for entry in manifest.artifacts]

    # Then
    expected = [name for names in RUN_ARTIFACTS.values() for name in names]
    assert len(RUN_ARTIFACTS) == 9
    assert len(paths) == len(set(paths)), f"Actual duplicated paths = {paths}"
    assert sorted(paths) == sorted(expected), f"Actual paths = {sorted(paths)}"


@pytest.mark.slow
def test_run_Should_beat_the_garch_baseline_on_mae_on_the_default_fixture(default_run) -> None:
    # Given
    runner, _, _ = default_run

    # When
    mae = {report.model: report.mae for report in runner.state.reports}

    # Then
    assert mae[ENSEMBLE_LABEL] < mae[GARCH_LABEL], f"Actual MAE = {mae}"


@pytest.mark.slow
def test_fit_Should_keep_the_ensemble_close_to_its_best_submodel_on_validation_rows(default_run) -> None:
    # Given
    runner, _, _ = default_run
    matrix = runner.state.matrix
    model = runner.state.models[ENSEMBLE_LABEL]
    _, validation = split_rows(matrix, runner.config.split.train_end, runner.config.split.validation_end)

    # When
    lstm_predictions, gbt_predictions = submodel_predictions(model, matrix, validation)
    combined = predict_ensemble(model, matrix, validation)

    # Then
    target = matrix.target[validation]
    combined_mae = np.mean(np.abs(target - combined))
    best_submodel_mae = min(np.mean(np.abs(target - lstm_predictions)), np.mean(np.abs(target - gbt_predictions)))
    assert combined_mae <= 1.05 * best_submodel_mae, f"Actual MAE = {combined_mae} vs best {best_submodel_mae}"


@pytest.mark.slow
def test_run_Should_split_every_fixture_day_into_jump_and_continuous_variation(default_run) -> None:
    # Given
    runner, _, _ = default_run

    # When
    measures = runner.state.measures

    # Then
    assert len(measures) == DEFAULT_FIXTURE_DAYS, f"Actual days = {len(measures)}"
    for measure in measures:
        assert measure.jump >= 0 and measure.cv >= 0, f"Actual measure = {measure}"
        assert abs(measure.jump + measure.cv - measure.rv) <= 1e-12 * max(1.0, measure.rv), f"Actual measure = {measure}"


@pytest.mark.slow
def test_ablate_Should_raise_the_mae_When_any_feature_group_is_disabled(default_run) -> None:
    # Given
    _, _, rows = default_run

    # When
    deltas = {row.toggle: row.delta_mae for row in rows[1:]}

    # Then
    assert set(deltas) == set(GROUP_TOGGLES), f"Actual toggles = {set(deltas)}"
    for toggle, delta in deltas.items():
        assert delta > 0, f"Actual MAE change without {toggle} = {delta}"
