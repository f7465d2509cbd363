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

import argparse
from typing import Sequence

from src.config import VERSION
from src.domain.pipeline.pipeline_data_objects import STAGES, TOGGLES

DEFAULT_CONFIG = "faep.toml"


def parse_args(args: Sequence[str]) -> argparse.Namespace:
    """
    Defines the commands and options available for the CLI and sets up argument
    parsing to enable the conversion of the program's argument list into
    well-defined options and commands whenever possible.

    The "--help" or "-h" option is automatically provided by argparse.
    Args:
        args (Sequence[str]): Command-line arguments to parse.

    Returns:
        argparse.Namespace: Contains the parsed options and arguments.
    """
    parser = argparse.ArgumentParser(
        prog="faep",
        usage="\t%(prog)s [-h | --help] [-v | --version] <command> [--config <path>] [--seed <int>] "
        "[--out <dir>] [--resume] [--offline]",
    )
    parser.add_argument("-v", "--version", action="version", version="%(prog)s {}".format(VERSION))

    # Global flags, accepted by every pipeline command
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", type=str, default=DEFAULT_CONFIG, help="pipeline configuration file")
    common.add_argument("--seed", type=int, default=None, help="override the configured seed")
    common.add_argument("--out", type=str, default=None, help="override the configured output directory")
    common.add_argument("--resume", action="store_true", help="reuse intermediates of a previous identical run")
    common.add_argument("--offline", action="store_true", help="force the offline weather scorer")
    common.add_argument("--verbose", action="store_true", help="log debug messages to the terminal")

    subparsers = parser.add_subparsers(
        dest="command", title="Available commands (faep <command> -h to get specific help)", metavar=""
    )
    subparsers.required = True

    helps = {
        "ingest": "validate and clean the half-hourly price table",
        "measures": "compute daily realized measures and the jump decomposition",
        "rate": "score weather periods from the report corpus",
        "features": "assemble, select and reduce the feature matrix",
        "fit": "fit the baselines and the ensemble",
        "backtest": "walk-forward out-of-sample forecasts",
        "evaluate": "metrics, pairwise DM tests and the rejection heatmap",
        "plot": "render the report figures",
    }
    for stage in STAGES:
        subparsers.add_parser(stage, parents=[common], help=helps[stage], usage=f"faep {stage} [options]")

    subparsers.add_parser("run", parents=[common], help="run every stage", usage="faep run [options]")

    parser_ablate = subparsers.add_parser(
        "ablate",
        parents=[common],
        help="compare the ensemble with components disabled",
        usage="faep ablate [options] [--toggles <toggle,...>]",
    )
    parser_ablate.add_argument(
        "--toggles",
        type=lambda value: tuple(item.strip() for item in value.split(",") if item.strip()),
        default=TOGGLES,
        help=f"comma separated toggles among {', '.join(TOGGLES)} (default: all)",
    )

    parser_synth = subparsers.add_parser(
        "synth", help="write a synthetic fixture and its configuration", usage="faep synth [-h] [--out <dir>]"
    )
    parser_synth.add_argument("--out", type=str, default="faep_fixture", help="fixture directory")
    parser_synth.add_argument("--days", type=int, default=400, help="number of trading days")
    parser_synth.add_argument("--seed", type=int, default=0, help="generator seed")
    parser_synth.add_argument("--verbose", action="store_true", help="log debug messages to the terminal")

    return parser.parse_args(args)
