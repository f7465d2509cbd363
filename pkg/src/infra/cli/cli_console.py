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

from rich.console import Console


class CliConsole:
    """
    Singleton class to ensure only one instance of Console is created per
    stream. Reports go to stdout, logs and errors to stderr.
    """

    __instance = None
    __error_instance = None

    @staticmethod
    def instance() -> Console:
        if CliConsole.__instance is None:
            CliConsole.__instance = Console()
        return CliConsole.__instance

    @staticmethod
    def error_instance() -> Console:
        if CliConsole.__error_instance is None:
            CliConsole.__error_instance = Console(stderr=True)
        return CliConsole.__error_instance
