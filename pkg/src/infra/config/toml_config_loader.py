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
import logging
import tomllib
from datetime import date
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

from src.domain.errors import ConfigValidationError
from src.domain.features.feature_data_objects import FeatureSettings, KernelSpec
from src.domain.forecasting.forecasting_data_objects import GbtParams, LstmParams
from src.domain.pipeline.pipeline_data_objects import (
    TOGGLES,
    AblationToggles,
    BacktestConfig,
    DataPaths,
    MeasuresConfig,
    ModelsConfig,
    PipelineConfig,
    SplitConfig,
)
from src.domain.weather.weather_data_objects import ProviderConfig, RatingSettings, RuleTable

logger = logging.getLogger(__name__)

SECTIONS = (
    "data",
    "split",
    "measures",
    "features",
    "kpca",
    "models",
    "ablation",
    "provider",
    "rating",
    "backtest",
    "seed",
    "out_dir",
)
MODEL_SECTIONS = ("har", "garch", "gbt", "lstm")


def load_config(path: Path) -> PipelineConfig:
    """
    Read a pipeline configuration file. Relative paths are resolved against
    the directory of the file.

    Raises:
            ConfigValidationError: Unreadable file, unknown key or invalid value.
    """
    document = _read_toml(path)
    try:
        return parse_config(document, path.resolve().parent)
    except ConfigValidationError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigValidationError(f"Invalid configuration {path}: {e}") from e


def parse_config(document: Dict[str, Any], base_dir: Path) -> PipelineConfig:
    _check_keys("configuration", document, SECTIONS)

    data_section = _section(document, "data")
    _check_keys("[data]", data_section, ("prices", "exogenous", "corpus", "rule_table"))
    if "prices" not in data_section:
        raise ConfigValidationError("[data] prices is required")
    data = DataPaths(
        prices=_path(data_section["prices"], base_dir),
        exogenous=_optional_path(data_section.get("exogenous"), base_dir),
        corpus=_optional_path(data_section.get("corpus"), base_dir),
        rule_table=_optional_path(data_section.get("rule_table"), base_dir),
    )

    split_section = _section(document, "split")
    _check_keys("[split]", split_section, ("train_end", "validation_end", "test_end"))
    split = SplitConfig(**{key: _date(key, value) for key, value in split_section.items()})

    measures = MeasuresConfig(**_fields("[measures]", _section(document, "measures"), MeasuresConfig))

    kpca_section = _section(document, "kpca")
    _check_keys("[kpca]", kpca_section, ("kernel", "gamma", "n_components", "variance_share", "mode"))
    features_section = _section(document, "features")
    _check_keys("[features]", features_section, ("target", "sfs_budget", "ridge_lambda", "use_kpca"))
    features = FeatureSettings(
        **features_section,
        kernel=KernelSpec(kind=kpca_section.get("kernel", "rbf"), gamma=kpca_section.get("gamma")),
        **{
            name: kpca_section[key]
            for key, name in (
                ("n_components", "n_components"),
                ("variance_share", "variance_share"),
                ("mode", "kpca_mode"),
            )
            if key in kpca_section
        },
    )

    models_section = _section(document, "models")
    _check_keys("[models]", models_section, MODEL_SECTIONS)
    har_section = _section(models_section, "har")
    _check_keys("[models.har]", har_section, ("variants",))
    garch_section = _section(models_section, "garch")
    _check_keys("[models.garch]", garch_section, ("max_iterations", "min_observations"))
    models = ModelsConfig(
        gbt=GbtParams(**_fields("[models.gbt]", _section(models_section, "gbt"), GbtParams, exclude=("seed",))),
        lstm=LstmParams(**_fields("[models.lstm]", _section(models_section, "lstm"), LstmParams, exclude=("seed",))),
        **{f"garch_{key}": value for key, value in garch_section.items()},
        **({"har_variants": tuple(har_section["variants"])} if "variants" in har_section else {}),
    )

    ablation_section = _section(document, "ablation")
    _check_keys("[ablation]", ablation_section, TOGGLES)
    toggles = AblationToggles(**{key: _boolean(key, value) for key, value in ablation_section.items()})

    provider_section = _fields("[provider]", _section(document, "provider"), ProviderConfig, exclude=("rule_table",))
    if "cache_file" in provider_section:
        provider_section["cache_file"] = _path(provider_section["cache_file"], base_dir)
    provider = ProviderConfig(
        **provider_section,
        rule_table=load_rule_table(data.rule_table) if data.rule_table is not None else None,
    )

    rating = RatingSettings(**_fields("[rating]", _section(document, "rating"), RatingSettings))
    backtest = BacktestConfig(**_fields("[backtest]", _section(document, "backtest"), BacktestConfig))

    seed = document.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigValidationError(f"seed must be an integer, got {seed!r}")

    return PipelineConfig(
        data=data,
        split=split,
        measures=measures,
        features=features,
        models=models,
        toggles=toggles,
        provider=provider,
        rating=rating,
        backtest=backtest,
        seed=seed,
        out_dir=_path(document.get("out_dir", "faep_out"), base_dir),
    )


def load_rule_table(path: Path) -> RuleTable:
    """
    Read the keyword rules of the offline scorer: a top-level integer `base`
    and a `[weights]` table of keyword = integer weight.
    """
    document = _read_toml(path)
    _check_keys(f"rule table {path}", document, ("base", "weights"))
    weights = document.get("weights", {})
    values = [document.get("base", 1), *weights.values()]
    if any(isinstance(value, bool) or not isinstance(value, int) for value in values):
        raise ConfigValidationError(f"Rule table {path} must hold integer base and weights")
    return RuleTable(base=document.get("base", 1), weights={str(key).lower(): value for key, value in weights.items()})


# PRIVATE FUNCTIONS
def _read_toml(path: Path) -> Dict[str, Any]:
    if not path.is_file():
        raise ConfigValidationError(f"Configuration file not found: {path}")
    try:
        with open(path, "rb") as file:
            return tomllib.load(file)
    except tomllib.TOMLDecodeError as e:
        raise ConfigValidationError(f"Invalid TOML in {path}: {e}") from e


def _section(document: Dict[str, Any], name: str) -> Dict[str, Any]:
    section = document.get(name, {})
    if not isinstance(section, dict):
        raise ConfigValidationError(f"[{name}] must be a table")
    return section


def _check_keys(label: str, section: Dict[str, Any], allowed: Iterable[str]) -> None:
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise ConfigValidationError(f"Unknown keys in {label}: {', '.join(unknown)}")


def _fields(label: str, section: Dict[str, Any], target: type, exclude: Iterable[str] = ()) -> Dict[str, Any]:
    allowed = [field.name for field in dataclasses.fields(target) if field.name not in exclude]
    _check_keys(label, section, allowed)
    return dict(section)


def _path(value: Any, base_dir: Path) -> Path:
    if not isinstance(value, str):
        raise ConfigValidationError(f"Expected a path string, got {value!r}")
    path = Path(value).expanduser()
    return path if path.is_absolute() else Path(base_dir, path)


def _optional_path(value: Any, base_dir: Path) -> Optional[Path]:
    return None if value is None else _path(value, base_dir)


def _date(key: str, value: Any) -> date:
    if isinstance(value, date):
        return value
    try:
        return date.fromisoformat(str(value))
    except ValueError:
        raise ConfigValidationError(f"[split] {key} must be an ISO date, got {value!r}") from None


def _boolean(key: str, value: Any) -> bool:
    if not isinstance(value, bool):
        raise ConfigValidationError(f"[ablation] {key} must be true or false, got {value!r}")
    return value
