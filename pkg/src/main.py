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

import sys
from argparse import Namespace
from typing import Dict, Sequence

from src.config import ExitCode
from src.domain.errors import FaepError
from src.environment import init_env
from src.infra.cli.cli_adapter import (
    ablate,
    backtest,
    evaluate,
    features,
    fit,
    ingest,
    measures,
    plot,
    rate,
    run,
    synth,
)
from src.infra.cli.cli_parse import parse_args
from src.infra.cli.cli_rich_print import print_error

COMMANDS = {
    "ingest": ingest,
    "measures": measures,
    "rate": rate,
    "features": features,
    "fit": fit,
    "backtest": backtest,
    "evaluate": evaluate,
    "plot": plot,
    "run": run,
    "ablate": ablate,
    "synth": synth,
}


def execute_command(function: str, args: Dict) -> None:
    COMMANDS[function](args)


def get_arguments(args: Namespace) -> Dict:
    """
    The parse_args() function returns an object with commands and arguments as
    attributes. This method converts those attributes into a dictionary,
    excluding the "command" key, as its purpose is to extract arguments only.
    For example, it might return {"config": "faep.toml", "seed": 3}, where
    "seed" overrides the configured seed. Refer to parse_args() for more details.
    """
    return {key: value for key, value in vars(args).items() if key != "command"}


def main(argv: Sequence[str] = ()) -> int:
    try:
        init_env()
        prog_args = parse_args(list(argv) or sys.argv[1:])
        execute_command(prog_args.command, get_arguments(prog_args))
        return ExitCode.SUCCESS
    except KeyboardInterrupt:
        print("Interrupted by user.")
        return ExitCode.FAILURE
    except FaepError as e:
        print_error(str(e))
        return e.exit_code
    except Exception as e:
        print(f"Error : {e}")
        return ExitCode.FAILURE


if __name__ == "__main__":
    sys.exit(main())
