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

import logging
from pathlib import Path
from typing import Dict, Optional

from src.domain.pipeline.pipeline_data_objects import PipelineConfig
from src.domain.pipeline.pipeline_runner import PipelineRunner
from src.infra.cli.cli_logging import setup_logging
from src.infra.cli.cli_rich_print import (
    print_ablation,
    print_heatmap,
    print_manifest,
    print_metrics,
    print_ratings,
    print_success,
)
from src.infra.config.toml_config_loader import load_config
from src.infra.data.artifact_store import FileArtifactStore
from src.infra.data.csv_exogenous_adapter import CsvExogenousAdapter
from src.infra.data.csv_price_adapter import CsvPriceAdapter, PriceCsvSchema
from src.infra.plotting.svg_plotter import SvgPlotter
from src.infra.synthetic.fixture_generator import generate_fixture
from src.infra.weather.weather_rater_factory import build_weather_rater

logger = logging.getLogger(__name__)

"""
CLI adapter which wires the pipeline runner to its file, plotting and
weather adapters and formats the results for the terminal. Each "public"
function here matches a CLI command.
"""


def build_config(args: Dict) -> PipelineConfig:
    """
    Load the configuration file and apply the global flag overrides.
    """
    config = load_config(Path(args["config"]))
    return config.with_overrides(
        seed=args.get("seed"),
        out_dir=Path(args["out"]) if args.get("out") else None,
        offline=bool(args.get("offline")),
    )


def build_runner(config: PipelineConfig, resume: bool = False) -> PipelineRunner:
    price_source = CsvPriceAdapter(
        schema=PriceCsvSchema(region_filter=config.measures.region),
        slots_per_day=config.measures.slots_per_day,
        allow_truncation=config.measures.allow_truncation,
        pad_missing_slots=config.measures.pad_missing_slots,
    )
    return PipelineRunner(
        config=config,
        price_source=price_source,
        exogenous_source=CsvExogenousAdapter(),
        store_factory=FileArtifactStore,
        plotter=SvgPlotter(),
        rater_factory=build_weather_rater,
        resume=resume,
    )


def run_stage(args: Dict, until: Optional[str] = None) -> PipelineRunner:
    """
    Run the pipeline up to a stage (every stage when None) and print what it
    produced.
    """
    setup_logging(bool(args.get("verbose")))
    runner = build_runner(build_config(args), resume=bool(args.get("resume")))
    manifest = runner.run(until=until)

    state = runner.state
    if until == "rate" and state.ratings:
        print_ratings(state.ratings)
    if state.reports:
        print_metrics(state.reports)
    if state.heatmap is not None:
        print_heatmap(state.heatmap)
    print_manifest(manifest)
    return runner


def ingest(args: Dict) -> None:
    run_stage(args, "ingest")


def measures(args: Dict) -> None:
    run_stage(args, "measures")


def rate(args: Dict) -> None:
    run_stage(args, "rate")


def features(args: Dict) -> None:
    run_stage(args, "features")


def fit(args: Dict) -> None:
    run_stage(args, "fit")


def backtest(args: Dict) -> None:
    run_stage(args, "backtest")


def evaluate(args: Dict) -> None:
    run_stage(args, "evaluate")


def plot(args: Dict) -> None:
    run_stage(args, "plot")


def run(args: Dict) -> None:
    run_stage(args)


def ablate(args: Dict) -> None:
    setup_logging(bool(args.get("verbose")))
    runner = build_runner(build_config(args), resume=bool(args.get("resume")))
    print_ablation(runner.ablate(args["toggles"]))


def synth(args: Dict) -> None:
    setup_logging(bool(args.get("verbose")))
    paths = generate_fixture(Path(args["out"]), days=args["days"], seed=args["seed"])
    print_success(f"Fixture written, run it with: faep run --config {paths.config}")
