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

import re
from pathlib import Path

import pandas as pd
import pytest

from src.domain.errors import ConfigValidationError
from src.infra.config.toml_config_loader import load_config
from src.infra.synthetic.fixture_generator import MIN_SEVERITY_CHANGE, SEVERITY_SENTENCES, generate_fixture


@pytest.fixture
def fixture_paths(tmp_path):
    print("[SETUP] Generate a 150-day fixture")
    yield generate_fixture(Path(tmp_path, "fixture"), days=150, seed=7)
    print("[TEARDOWN]")


def test_generate_fixture_Should_move_the_monthly_severity_by_at_least_two_levels(fixture_paths) -> None:
    # Given
    level_of = {sentence: level for level, sentence in SEVERITY_SENTENCES.items()}
    text = "".join(path.read_text(encoding="utf-8") for path in sorted(fixture_paths.corpus.glob("*.txt")))

    # When
    levels = [level_of[sentence] for sentence in re.findall(r"^In \w+ \d{4} (.+)\.$", text, flags=re.MULTILINE)]

    # Then
    assert len(levels) == 5, f"Actual monthly levels = {levels}"
    changes = [abs(current - previous) for previous, current in zip(levels, levels[1:])]
    assert min(changes) >= MIN_SEVERITY_CHANGE, f"Actual severity changes = {changes}"


def test_generate_fixture_Should_write_a_log_target_configuration_over_every_day(fixture_paths) -> None:
    # When
    config = load_config(fixture_paths.config)
    prices = pd.read_csv(fixture_paths.prices)
    exogenous = pd.read_csv(fixture_paths.exogenous)

    # Then
    assert config.features.target == "ln", f"Actual target = {config.features.target}"
    assert config.split.train_end < config.split.validation_end
    assert len(prices) == 150 * 48 and len(exogenous) == 150, f"Actual rows = {len(prices)}, {len(exogenous)}"
    assert "weather_rating" not in exogenous.columns, "Ratings come from the corpus, not the exogenous table"


def test_generate_fixture_Should_reject_a_too_short_fixture(tmp_path) -> None:
    # When / Then
    with pytest.raises(ConfigValidationError):
        generate_fixture(tmp_path, days=30)
