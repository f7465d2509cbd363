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
import importlib.metadata
import logging
import platform
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config import VERSION
from src.domain.errors import ConfigValidationError, DataError, FaepError, StageError
from src.domain.evaluation.backtest import rolling_backtest, target_days
from src.domain.evaluation.evaluation_data_objects import (
    BacktestScheme,
    DmResult,
    DmSettings,
    ForecastRecord,
    MetricReport,
    RejectionHeatmap,
)
from src.domain.evaluation.evaluation_metrics import metrics, pairwise_dm, records_by_model, rejection_heatmap
from src.domain.features.exogenous_source_port import ExogenousSourcePort
from src.domain.features.feature_builder import assemble, reduce_features
from src.domain.features.feature_data_objects import (
    ExogenousTable,
    FeatureMatrix,
    ReductionReport,
    TargetSpec,
)
from src.domain.forecasting.forecaster_port import ForecasterPort
from src.domain.forecasting.forecasters import ENSEMBLE_LABEL, EnsembleForecaster, GarchForecaster, HarForecaster
from src.domain.market.market_data_objects import IntradayPriceSeries
from src.domain.market.market_data_provider import (
    clean_nonpositive,
    close_to_close_returns,
    demean,
    intraday_returns,
    seasonal_profile,
)
from src.domain.market.price_source_port import PriceSourcePort
from src.domain.pipeline.artifact_store_port import ArtifactStorePort
from src.domain.pipeline.pipeline_data_objects import (
    STAGES,
    TOGGLES,
    AblationRow,
    ArtifactEntry,
    PipelineConfig,
    RunManifest,
)
from src.domain.pipeline.plotter_port import PlotterPort
from src.domain.realized.realized_data_objects import (
    MEASURE_COLUMNS,
    DailyRealizedMeasures,
    JumpTestConfig,
)
from src.domain.realized.realized_estimators import compute_measures, describe
from src.domain.weather.weather_data_objects import WeatherRating
from src.domain.weather.weather_rating_provider import WeatherRatingProvider, periods_for_days, ratings_to_feature
from src.timer import StageTimer

logger = logging.getLogger(__name__)

CLEANED_PRICES = "cleaned_prices.csv"
CLEANING_REPORT = "cleaning_report.json"
MEASURES = "measures.csv"
MEASURES_SUMMARY = "measures_summary.json"
RATINGS = "ratings.jsonl"
FEATURE_MATRIX = "feature_matrix.csv"
FEATURE_REDUCTION = "feature_reduction.json"
MODELS_DIR = "models"
FORECASTS = "forecasts.csv"
METRICS = "metrics.json"
METRICS_TABLE = "metrics.txt"
DM_TESTS = "dm_tests.json"
HEATMAP = "dm_heatmap.csv"
PLOTS_DIR = "plots"
ABLATION_DIR = "ablation"
ABLATION_REPORT = "ablation.json"
ABLATION_TABLE = "ablation.txt"
FULL_CONFIGURATION = "full"

# Stages whose outputs can be read back instead of recomputed
RESUMABLE_STAGES = ("ingest", "measures", "rate", "features", "fit", "backtest")


@dataclass
class RunState:
    series: Optional[IntradayPriceSeries] = None
    measures: Tuple[DailyRealizedMeasures, ...] = ()
    ratings: Tuple[WeatherRating, ...] = ()
    matrix: Optional[FeatureMatrix] = None
    models: Dict[str, Any] = field(default_factory=dict)
    records: Tuple[ForecastRecord, ...] = ()
    reports: Tuple[MetricReport, ...] = ()
    dm_results: Tuple[DmResult, ...] = ()
    heatmap: Optional[RejectionHeatmap] = None


def model_slug(label: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", label.lower()).strip("_")


def split_rows(matrix: FeatureMatrix, train_end, validation_end) -> Tuple[np.ndarray, np.ndarray]:
    """
    Usable rows whose forecast day falls up to train_end, and in
    (train_end, validation_end].
    """
    forecast_days = target_days(matrix)
    usable = matrix.usable_rows()
    train = np.array([row for row in usable if forecast_days[row] <= train_end], dtype=int)
    validation = np.array(
        [row for row in usable if train_end < forecast_days[row] <= validation_end], dtype=int
    )
    return train, validation


class PipelineRunner:
    """
    Runs the stages of a configuration in order, persisting every intermediate
    through the artifact store and recording them in a run manifest.

    Args:
            config (PipelineConfig): Validated configuration.
            price_source (PriceSourcePort): Raw and cleaned price tables.
            exogenous_source (ExogenousSourcePort): Daily factor table.
            store_factory (Callable[[Path], ArtifactStorePort]): Builds the store of an output directory.
            plotter (PlotterPort): Figure renderer.
            rater_factory (Callable[[PipelineConfig], WeatherRatingProvider]): Builds the weather scorer.
            resume (bool): Reuse intermediates of a previous run with the same config hash.
    """

    def __init__(
        self,
        config: PipelineConfig,
        price_source: PriceSourcePort,
        exogenous_source: ExogenousSourcePort,
        store_factory: Callable[[Path], ArtifactStorePort],
        plotter: PlotterPort,
        rater_factory: Callable[[PipelineConfig], WeatherRatingProvider],
        resume: bool = False,
    ):
        self.config = config
        self.price_source = price_source
        self.exogenous_source = exogenous_source
        self.store_factory = store_factory
        self.plotter = plotter
        self.rater_factory = rater_factory
        self.resume = resume
        self.store = store_factory(config.out_dir)
        self.state = RunState()
        self.__entries: List[ArtifactEntry] = []
        self.__timings: Dict[str, float] = {}
        self.__reused: List[str] = []

    def run(self, until: Optional[str] = None) -> RunManifest:
        """
        Execute the stages up to `until` (all stages when None). Earlier
        stages of a partial run reuse matching intermediates; the last one
        reuses only with resume enabled.

        Returns:
                RunManifest: Artifacts, timings and provenance of the run.
        """
        if until is not None and until not in STAGES:
            raise ConfigValidationError(f"Unknown stage '{until}', expected one of {', '.join(STAGES)}")
        stages = STAGES[: STAGES.index(until) + 1] if until is not None else STAGES
        self.__check_inputs()

        previous = self.store.read_manifest()
        if previous is not None and previous.config_hash != self.config.config_hash:
            previous = None
        self.state = RunState()
        self.__entries, self.__timings, self.__reused = [], {}, []

        reuse_open = previous is not None
        for stage in stages:
            if stage == "rate" and not self.rating_enabled:
                logger.info("stage=rate skipped (no corpus or rating disabled)")
                continue
            with StageTimer(stage, self.__timings):
                try:
                    allowed = reuse_open and (self.resume or (until is not None and stage != until))
                    if allowed and self.__reuse(stage, previous):
                        self.__reused.append(stage)
                    else:
                        reuse_open = False
                        names = self.__run_stage(stage)
                        self.__entries.extend(ArtifactEntry(name, self.store.digest(name), stage) for name in names)
                except FaepError as e:
                    raise StageError(stage, e, self.__last_good_artifact()) from e
            self.__log_stage(stage)

        manifest = RunManifest(
            config_hash=self.config.config_hash,
            artifacts=tuple(self.__entries),
            stage_timings=dict(self.__timings),
            versions=_versions(),
            seed=self.config.seed,
            created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            reused_stages=tuple(self.__reused),
        )
        self.store.write_manifest(manifest)
        return manifest

    def ablate(self, toggles: Sequence[str]) -> Tuple[AblationRow, ...]:
        """
        Run the full configuration, then once per toggle with that component
        disabled in its own output subdirectory, and compare the ensemble
        metrics.

        Returns:
                Tuple[AblationRow, ...]: The full configuration first, then one row per toggle.
        """
        unknown = [toggle for toggle in toggles if toggle not in TOGGLES]
        if unknown:
            raise ConfigValidationError(
                f"Unknown toggles {', '.join(unknown)}, valid toggles: {', '.join(TOGGLES)}"
            )

        self.run(until="evaluate")
        base = self.ensemble_report()
        rows = [AblationRow(FULL_CONFIGURATION, base.mae, base.mse, base.mape, 0.0, 0.0, 0.0, 0.0)]
        for toggle in dict.fromkeys(toggles):
            variant = dataclasses.replace(
                self.config,
                toggles=self.config.toggles.without(toggle),
                out_dir=Path(self.config.out_dir, ABLATION_DIR, toggle),
            )
            logger.info("Ablation run without %s", toggle)
            runner = PipelineRunner(
                variant,
                self.price_source,
                self.exogenous_source,
                self.store_factory,
                self.plotter,
                self.rater_factory,
                self.resume,
            )
            runner.run(until="evaluate")
            report = runner.ensemble_report()
            rows.append(
                AblationRow(
                    toggle=toggle,
                    mae=report.mae,
                    mse=report.mse,
                    mape=report.mape,
                    delta_mae=report.mae - base.mae,
                    delta_mse=report.mse - base.mse,
                    delta_mape=report.mape - base.mape,
                    relative_mae_pct=100.0 * (report.mae - base.mae) / base.mae if base.mae else 0.0,
                )
            )

        self.store.write_document(
            f"{ABLATION_DIR}/{ABLATION_REPORT}", [dataclasses.asdict(row) for row in rows]
        )
        self.store.write_text(f"{ABLATION_DIR}/{ABLATION_TABLE}", format_ablation_table(rows))
        return tuple(rows)

    def ensemble_report(self) -> MetricReport:
        for report in self.state.reports:
            if report.model == ENSEMBLE_LABEL:
                return report
        raise DataError("The run holds no ensemble metrics")

    @property
    def rating_enabled(self) -> bool:
        toggles = self.config.toggles
        return self.config.data.corpus is not None and toggles.rating and toggles.llm_features

    def forecasters(self) -> Tuple[ForecasterPort, ...]:
        matrix = self.__require(self.state.matrix, "feature matrix")
        _, validation = split_rows(matrix, self.config.split.train_end, self.config.split.validation_end)
        target_spec = TargetSpec(self.config.features.target)
        har = tuple(HarForecaster(variant) for variant in self.config.models.har_variants)
        garch = GarchForecaster(
            self.__daily_returns(),
            target_spec,
            self.config.models.garch_max_iterations,
            self.config.models.garch_min_observations,
        )
        ensemble = EnsembleForecaster(self.config.ensemble_params(), validation_size=max(1, len(validation)))
        return har + (garch, ensemble)

    # PRIVATE METHODS
    def __run_stage(self, stage: str) -> Tuple[str, ...]:
        return {
            "ingest": self.__ingest,
            "measures": self.__measures,
            "rate": self.__rate,
            "features": self.__features,
            "fit": self.__fit,
            "backtest": self.__backtest,
            "evaluate": self.__evaluate,
            "plot": self.__plot,
        }[stage]()

    def __ingest(self) -> Tuple[str, ...]:
        series, summary = self.price_source.read_series(self.config.data.prices)
        cleaned, report = clean_nonpositive(series)
        self.price_source.write_cleaned(cleaned, report, self.store.path(CLEANED_PRICES))
        document = report.to_document()
        document["validation"] = {
            "nonpositive_count": summary.nonpositive_count,
            "padded_count": len(summary.padded_positions),
            "truncated_days": [day.isoformat() for day in summary.truncated_days],
        }
        document["raw_price_summary"] = dataclasses.asdict(describe(series.prices.reshape(-1)))
        document["cleaned_price_summary"] = dataclasses.asdict(describe(cleaned.prices.reshape(-1)))
        self.store.write_document(CLEANING_REPORT, document)
        self.state.series = cleaned
        return CLEANED_PRICES, CLEANING_REPORT

    def __measures(self) -> Tuple[str, ...]:
        series = self.__require(self.state.series, "cleaned prices")
        panel = intraday_returns(series)
        if self.config.measures.demean:
            panel = demean(panel, seasonal_profile(panel, (panel.days[0], self.config.split.train_end)))
        measures = compute_measures(panel, JumpTestConfig(self.config.measures.jump_alpha))
        self.store.write_measures(MEASURES, measures)
        summary = {}
        for column in MEASURE_COLUMNS[2:]:
            values = [getattr(measure, column) for measure in measures]
            defined = [value for value in values if value is not None and np.isfinite(value)]
            summary[column] = dataclasses.asdict(describe(defined)) if defined else None
        self.store.write_document(MEASURES_SUMMARY, summary)
        self.state.measures = measures
        return MEASURES, MEASURES_SUMMARY

    def __rate(self) -> Tuple[str, ...]:
        days = [measure.day for measure in self.__require(self.state.measures, "realized measures")]
        rater = self.rater_factory(self.config)
        self.state.ratings = rater.score_periods(periods_for_days(days, self.config.rating.granularity))
        return (self.store.write_ratings(RATINGS, self.state.ratings),)

    def __features(self) -> Tuple[str, ...]:
        measures = self.__require(self.state.measures, "realized measures")
        exog = None
        if self.config.data.exogenous is not None:
            exog = self.exogenous_source.read_table(self.config.data.exogenous)
        if self.state.ratings:
            if exog is None:
                exog = ExogenousTable(days=tuple(measure.day for measure in measures), columns={})
            exog = exog.with_column("weather_rating", ratings_to_feature(self.state.ratings, exog.days))

        matrix = assemble(
            measures,
            exog,
            TargetSpec(self.config.features.target),
            self.config.toggles.disabled_groups(),
            self.__daily_returns(),
        )
        train, validation = split_rows(matrix, self.config.split.train_end, self.config.split.validation_end)
        if len(train) == 0 or len(validation) == 0:
            raise DataError(
                f"The split leaves {len(train)} training and {len(validation)} validation rows, both must be non-empty"
            )
        reduced, reduction = reduce_features(
            matrix, self.config.features, train, validation, self.config.toggles.llm_features
        )
        names = self.store.write_matrix(FEATURE_MATRIX, reduced)
        self.store.write_document(FEATURE_REDUCTION, _reduction_document(reduction, reduced))
        self.state.matrix = reduced
        return names + (FEATURE_REDUCTION,)

    def __fit(self) -> Tuple[str, ...]:
        matrix = self.__require(self.state.matrix, "feature matrix")
        train, validation = split_rows(matrix, self.config.split.train_end, self.config.split.validation_end)
        rows = np.concatenate([train, validation])
        names = []
        for forecaster in self.forecasters():
            model = forecaster.fit(matrix, rows)
            self.state.models[forecaster.label] = model
            names.append(self.store.write_model(self.__model_name(forecaster.label), model))
        return tuple(names)

    def __backtest(self) -> Tuple[str, ...]:
        matrix = self.__require(self.state.matrix, "feature matrix")
        scheme = BacktestScheme(
            train_end=self.config.split.validation_end,
            test_end=self.config.split.test_end,
            refit_cadence=self.config.backtest.refit_cadence,
        )
        self.state.records = rolling_backtest(self.forecasters(), matrix, scheme, prefitted=self.state.models)
        return (self.store.write_records(FORECASTS, self.state.records),)

    def __evaluate(self) -> Tuple[str, ...]:
        records = self.__require(self.state.records, "forecast records")
        grouped = records_by_model(records)
        settings = DmSettings(
            significance=self.config.backtest.significance,
            newey_west_lag=self.config.backtest.newey_west_lag,
            small_sample=self.config.backtest.small_sample,
        )
        self.state.reports = tuple(metrics(grouped[model]) for model in grouped)
        self.state.dm_results = pairwise_dm(grouped, settings)
        names = [
            self.store.write_document(METRICS, [report.to_document() for report in self.state.reports]),
            self.store.write_text(METRICS_TABLE, format_metric_table(self.state.reports)),
            self.store.write_document(DM_TESTS, [result.to_document() for result in self.state.dm_results]),
        ]
        common = len(next(iter(grouped.values())))
        if common >= self.config.backtest.segment_size:
            self.state.heatmap = rejection_heatmap(grouped, self.config.backtest.segment_size, settings)
            names.append(self.store.write_heatmap(HEATMAP, self.state.heatmap))
        else:
            logger.warning(
                "Only %d forecasts per model, no full segment of %d for the rejection heatmap",
                common,
                self.config.backtest.segment_size,
            )
        return tuple(names)

    def __plot(self) -> Tuple[str, ...]:
        records = self.__require(self.state.records, "forecast records")
        names = []
        for model, model_records in records_by_model(records).items():
            name = f"{PLOTS_DIR}/forecast_{model_slug(model)}.svg"
            self.plotter.plot_forecasts(model, model_records, self.store.path(name))
            names.append(name)
        if self.state.heatmap is not None:
            name = f"{PLOTS_DIR}/dm_heatmap.svg"
            self.plotter.plot_heatmap(self.state.heatmap, self.store.path(name))
            names.append(name)
        return tuple(names)

    def __reuse(self, stage: str, previous: RunManifest) -> bool:
        if stage not in RESUMABLE_STAGES:
            return False
        entries = previous.artifacts_of(stage)
        if not entries:
            return False
        if not all(self.store.exists(entry.path) and self.store.digest(entry.path) == entry.sha256 for entry in entries):
            return False

        if stage == "ingest":
            self.state.series = self.price_source.read_cleaned(self.store.path(CLEANED_PRICES))
        elif stage == "measures":
            self.state.measures = self.store.read_measures(MEASURES)
        elif stage == "rate":
            self.state.ratings = self.store.read_ratings(RATINGS)
        elif stage == "features":
            self.state.matrix = self.store.read_matrix(FEATURE_MATRIX)
        elif stage == "fit":
            for forecaster in self.forecasters():
                name = self.__model_name(forecaster.label)
                if not self.store.exists(name):
                    return False
                self.state.models[forecaster.label] = self.store.read_model(name)
        elif stage == "backtest":
            self.state.records = self.store.read_records(FORECASTS)
        self.__entries.extend(entries)
        return True

    def __check_inputs(self) -> None:
        data = self.config.data
        required = [data.prices] + [path for path in (data.exogenous,) if path is not None]
        if self.rating_enabled:
            required.append(data.corpus)
        missing = [str(path) for path in required if not Path(path).exists()]
        if missing:
            raise DataError(f"Input files not found: {', '.join(missing)}")

    def __daily_returns(self) -> Dict:
        series = self.__require(self.state.series, "cleaned prices")
        days, returns = close_to_close_returns(series)
        return dict(zip(days, (float(value) for value in returns)))

    def __model_name(self, label: str) -> str:
        return f"{MODELS_DIR}/{model_slug(label)}.json"

    def __last_good_artifact(self) -> Optional[str]:
        return str(self.store.path(self.__entries[-1].path)) if self.__entries else None

    def __log_stage(self, stage: str) -> None:
        elapsed = self.__timings.get(stage, 0.0)
        entries = [entry for entry in self.__entries if entry.stage == stage]
        if not entries:
            logger.info("stage=%s elapsed=%.3f", stage, elapsed)
        for entry in entries:
            logger.info("stage=%s elapsed=%.3f artifact=%s sha256=%s", stage, elapsed, entry.path, entry.sha256[:12])

    @staticmethod
    def __require(value, label: str):
        if value is None or (isinstance(value, tuple) and not value):
            raise DataError(f"No {label} available, run the previous stages first")
        return value


def format_metric_table(reports: Sequence[MetricReport]) -> str:
    lines = [f"{'model':<16}{'MAE':>14}{'MSE':>14}{'MAPE':>14}{'n':>8}"]
    for report in reports:
        lines.append(f"{report.model:<16}{report.mae:>14.6g}{report.mse:>14.6g}{report.mape:>14.6g}{report.n:>8}")
    return "\n".join(lines) + "\n"


def format_ablation_table(rows: Sequence[AblationRow]) -> str:
    lines = [f"{'configuration':<22}{'MAE':>12}{'MSE':>12}{'MAPE':>12}{'dMAE':>12}{'dMSE':>12}{'dMAPE':>12}{'MAE %':>10}"]
    for row in rows:
        label = row.toggle if row.toggle == FULL_CONFIGURATION else f"w/o {row.toggle}"
        lines.append(
            f"{label:<22}{row.mae:>12.6g}{row.mse:>12.6g}{row.mape:>12.6g}"
            f"{row.delta_mae:>+12.4g}{row.delta_mse:>+12.4g}{row.delta_mape:>+12.4g}{row.relative_mae_pct:>+10.2f}"
        )
    return "\n".join(lines) + "\n"


# PRIVATE FUNCTIONS
def _reduction_document(reduction: ReductionReport, matrix: FeatureMatrix) -> Dict[str, Any]:
    document: Dict[str, Any] = {
        "model_features": list(matrix.model_features),
        "standardization": {"means": reduction.standardization.means, "stds": reduction.standardization.stds},
        "selection": None,
        "kpca": None,
    }
    if reduction.selection is not None:
        document["selection"] = {
            "selected": list(reduction.selection.selected),
            "scores": list(reduction.selection.scores),
            "budget": reduction.selection.budget,
            "baseline_score": reduction.selection.baseline_score,
        }
    if reduction.kpca is not None:
        document["kpca"] = {
            "kernel": reduction.kpca.kernel.kind,
            "gamma": reduction.kpca.kernel.gamma,
            "n_components": reduction.kpca.n_components,
            "eigenvalues": reduction.kpca.eigenvalues.tolist(),
            "explained_share": reduction.kpca.explained_share,
        }
    return document


def _versions() -> Dict[str, str]:
    versions = {"faep": VERSION, "python": platform.python_version()}
    for package in ("numpy", "scipy", "pandas", "matplotlib"):
        try:
            versions[package] = importlib.metadata.version(package)
        except importlib.metadata.PackageNotFoundError:
            versions[package] = "unknown"
    return versions
