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

from pathlib import Path

from src.config import PROMPT_TEMPLATE_VERSION
from src.domain.errors import ConfigValidationError
from src.domain.weather.weather_data_objects import PromptTemplate
from src.environment import PROMPT_TEMPLATE_FILE

SEPARATOR = "---"


def load_prompt_template(path: Path = PROMPT_TEMPLATE_FILE, version: str = PROMPT_TEMPLATE_VERSION) -> PromptTemplate:
    """
    A template file holds the system text, a line with `---`, then the user
    text with {period}, {context} and {question} placeholders.
    """
    if not path.is_file():
        raise ConfigValidationError(f"Prompt template not found: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    if SEPARATOR not in (line.strip() for line in lines):
        raise ConfigValidationError(f"Prompt template {path} has no '{SEPARATOR}' separator line")
    position = next(index for index, line in enumerate(lines) if line.strip() == SEPARATOR)
    system = "\n".join(lines[:position]).strip()
    user = "\n".join(lines[position + 1 :]).strip()
    for placeholder in ("{period}", "{context}", "{question}"):
        if placeholder not in user:
            raise ConfigValidationError(f"Prompt template {path} lacks the {placeholder} placeholder")
    return PromptTemplate(version=version, system=system, user=user)
