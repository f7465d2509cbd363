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
import hashlib
import json
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from src.config import (
    DEFAULT_TRAIN_END,
    DEFAULT_VALIDATION_END,
    DM_SEGMENT_SIZE,
    DM_SIGNIFICANCE,
    GARCH_MAX_ITERATIONS,
    GARCH_MIN_OBSERVATIONS,
    JUMP_ALPHA,
    MARKET_REGION,
    REFIT_CADENCE,
    SLOTS_PER_DAY,
)
from src.domain.errors import ConfigValidationError
from src.domain.features.feature_data_objects import (
    PRICE_FLUCTUATIONS_GROUP,
    RATING_GROUP,
    REGIONAL_GROUP,
    SUPPLY_DEMAND_GROUP,
    WEATHER_GROUP,
    FeatureSettings,
)
from src.domain.forecasting.forecasting_data_objects import (
    HAR_CJ,
    HAR_DESIGN,
    HARQ_CJ,
    EnsembleParams,
    GbtParams,
    LstmParams,
)
from src.domain.weather.weather_data_objects import OFFLINE_PROVIDER, ProviderConfig, RatingSettings

# Stage order of a full run
STAGES: Tuple[str, ...] = ("ingest", "measures", "rate", "features", "fit", "backtest", "evaluate", "plot")

GROUP_TOGGLES = (WEATHER_GROUP, SUPPLY_DEMAND_GROUP, PRICE_FLUCTUATIONS_GROUP, REGIONAL_GROUP, RATING_GROUP)
MODEL_TOGGLES = ("llm_features", "lstm", "gbt")
TOGGLES: Tuple[str, ...] = GROUP_TOGGLES + MODEL_TOGGLES


@dataclass(frozen=True)
class DataPaths:
    prices: Path
    exogenous: Optional[Path] = None
    corpus: Optional[Path] = None
    rule_table: Optional[Path] = None


@dataclass(frozen=True)
class SplitConfig:
    """
    Train rows forecast days up to train_end, validation rows days up to
    validation_end, the test span follows (up to test_end when set).
    """

    train_end: date = DEFAULT_TRAIN_END
    validation_end: date = DEFAULT_VALIDATION_END
    test_end: Optional[date] = None

    def __post_init__(self) -> None:
        if not self.train_end < self.validation_end:
            raise ConfigValidationError(
                f"Split dates must be strictly ordered: train_end {self.train_end} >= validation_end {self.validation_end}"
            )
        if self.test_end is not None and not self.validation_end < self.test_end:
            raise ConfigValidationError(
                f"Split dates must be strictly ordered: test_end {self.test_end} <= validation_end {self.validation_end}"
            )


@dataclass(frozen=True)
class MeasuresConfig:
    jump_alpha: float = JUMP_ALPHA
    slots_per_day: int = SLOTS_PER_DAY
    region: str = MARKET_REGION
    allow_truncation: bool = False
    pad_missing_slots: bool = False
    demean: bool = False

    def __post_init__(self) -> None:
        if not 0 < self.jump_alpha < 1:
            raise ConfigValidationError(f"Jump-test alpha must lie in (0, 1), got {self.jump_alpha}")
        if self.slots_per_day < 2:
            raise ConfigValidationError(f"At least two slots per day are required, got {self.slots_per_day}")


@dataclass(frozen=True)
class ModelsConfig:
    gbt: GbtParams = GbtParams()
    lstm: LstmParams = LstmParams()
    garch_max_iterations: int = GARCH_MAX_ITERATIONS
    garch_min_observations: int = GARCH_MIN_OBSERVATIONS
    har_variants: Tuple[str, ...] = (HAR_CJ, HARQ_CJ)

    def __post_init__(self) -> None:
        unknown = [variant for variant in self.har_variants if variant not in HAR_DESIGN]
        if unknown:
            raise ConfigValidationError(f"Unknown HAR variants: {', '.join(unknown)}")
        if self.garch_max_iterations < 1 or self.garch_min_observations < 2:
            raise ConfigValidationError("GARCH needs max_iterations >= 1 and min_observations >= 2")


@dataclass(frozen=True)
class AblationToggles:
    """
    Pipeline components, all enabled by default. Disabling a group drops its
    columns; llm_features drops the rating column and the selection/KPCA
    reduction; lstm and gbt remove one ensemble submodel.
    """

    weather: bool = True
    supply_demand: bool = True
    price_fluctuations: bool = True
    regional: bool = True
    rating: bool = True
    llm_features: bool = True
    lstm: bool = True
    gbt: bool = True

    def __post_init__(self) -> None:
        if not (self.lstm or self.gbt):
            raise ConfigValidationError("The lstm and gbt toggles cannot both be disabled")

    def disabled_groups(self) -> frozenset:
        groups = {group for group in GROUP_TOGGLES if not getattr(self, group)}
        if not self.llm_features:
            groups.add(RATING_GROUP)
        return frozenset(groups)

    def without(self, toggle: str) -> "AblationToggles":
        if toggle not in TOGGLES:
            raise ConfigValidationError(f"Unknown toggle '{toggle}', valid toggles: {', '.join(TOGGLES)}")
        return dataclasses.replace(self, **{toggle: False})


@dataclass(frozen=True)
class BacktestConfig:
    refit_cadence: Optional[int] = REFIT_CADENCE
    segment_size: int = DM_SEGMENT_SIZE
    significance: float = DM_SIGNIFICANCE
    newey_west_lag: int = 0
    small_sample: bool = False


@dataclass(frozen=True)
class PipelineConfig:
    """
    Declarative description of a run.

    Attributes:
        data (DataPaths): Input files.
        split (SplitConfig): Train, validation and test dates.
        measures (MeasuresConfig): Ingestion and jump-test settings.
        features (FeatureSettings): Target transform, selection and KPCA.
        models (ModelsConfig): Submodel hyperparameters.
        toggles (AblationToggles): Enabled components.
        provider (ProviderConfig): Weather scorer.
        rating (RatingSettings): Chunking, retrieval and rating granularity.
        backtest (BacktestConfig): Refit cadence and DM settings.
        seed (int): Seed of every stochastic fit.
        out_dir (Path): Artifact directory.
    """

    data: DataPaths
    split: SplitConfig = SplitConfig()
    measures: MeasuresConfig = MeasuresConfig()
    features: FeatureSettings = FeatureSettings()
    models: ModelsConfig = ModelsConfig()
    toggles: AblationToggles = AblationToggles()
    provider: ProviderConfig = ProviderConfig()
    rating: RatingSettings = RatingSettings()
    backtest: BacktestConfig = BacktestConfig()
    seed: int = 0
    out_dir: Path = Path("faep_out")

    def to_document(self) -> Dict[str, Any]:
        return _jsonable(dataclasses.asdict(self))

    @property
    def config_hash(self) -> str:
        """
        SHA-256 of the canonical JSON form of the configuration, out_dir excluded.
        """
        document = self.to_document()
        document.pop("out_dir")
        return hashlib.sha256(json.dumps(document, sort_keys=True).encode("utf-8")).hexdigest()

    def ensemble_params(self) -> EnsembleParams:
        return EnsembleParams(
            gbt=dataclasses.replace(self.models.gbt, seed=self.seed),
            lstm=dataclasses.replace(self.models.lstm, seed=self.seed),
            use_gbt=self.toggles.gbt,
            use_lstm=self.toggles.lstm,
        )

    def with_overrides(
        self, seed: Optional[int] = None, out_dir: Optional[Path] = None, offline: bool = False
    ) -> "PipelineConfig":
        config = self
        if seed is not None:
            config = dataclasses.replace(config, seed=seed)
        if out_dir is not None:
            config = dataclasses.replace(config, out_dir=out_dir)
        if offline and config.provider.kind != OFFLINE_PROVIDER:
            config = dataclasses.replace(config, provider=dataclasses.replace(config.provider, kind=OFFLINE_PROVIDER))
        return config


@dataclass(frozen=True)
class ArtifactEntry:
    path: str
    sha256: str
    stage: str


@dataclass(frozen=True)
class RunManifest:
    """
    Reproducibility record of a run.

    Attributes:
        config_hash (str): PipelineConfig.config_hash.
        artifacts (Tuple[ArtifactEntry, ...]): Every emitted file once, path relative to out_dir.
        stage_timings (Dict[str, float]): Seconds per stage.
        versions (Dict[str, str]): Package versions.
        seed (int): Run seed.
        created_at (str): ISO timestamp of the run.
    """

    config_hash: str
    artifacts: Tuple[ArtifactEntry, ...]
    stage_timings: Dict[str, float]
    versions: Dict[str, str]
    seed: int
    created_at: str
    reused_stages: Tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        paths = [artifact.path for artifact in self.artifacts]
        if len(set(paths)) != len(paths):
            raise ConfigValidationError("A manifest must list every artifact exactly once")

    def artifacts_of(self, stage: str) -> Tuple[ArtifactEntry, ...]:
        return tuple(artifact for artifact in self.artifacts if artifact.stage == stage)

    def to_document(self) -> Dict[str, Any]:
        return _jsonable(dataclasses.asdict(self))

    @classmethod
    def from_document(cls, document: Dict[str, Any]) -> "RunManifest":
        return cls(
            config_hash=document["config_hash"],
            artifacts=tuple(ArtifactEntry(**artifact) for artifact in document["artifacts"]),
            stage_timings=dict(document["stage_timings"]),
            versions=dict(document["versions"]),
            seed=document["seed"],
            created_at=document["created_at"],
            reused_stages=tuple(document.get("reused_stages", ())),
        )


@dataclass(frozen=True)
class AblationRow:
    """
    Metrics of the ensemble with one component disabled, next to the full
    configuration.
    """

    toggle: str
    mae: float
    mse: float
    mape: float
    delta_mae: float
    delta_mse: float
    delta_mape: float
    relative_mae_pct: float


# PRIVATE FUNCTIONS
def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, date):
        return value.isoformat()
    if isinstance(value, Path):
        return str(value)
    return value
