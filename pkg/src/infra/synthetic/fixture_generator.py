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

import calendar
import logging
from dataclasses import dataclass
from datetime import date, datetime, timedelta
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd

from src.config import MARKET_REGION, SLOTS_PER_DAY
from src.domain.errors import ConfigValidationError

logger = logging.getLogger(__name__)

FIXTURE_START = date(2015, 1, 1)
MIN_FIXTURE_DAYS = 120
PRICE_LEVEL = 60.0
NONPOSITIVE_PROBABILITY = 0.002
JUMP_INTENSITY = 0.06

# Severity descriptions; the offline rule table below maps them back to 1..5
SEVERITY_SENTENCES = {
    1: "the weather stayed mild and settled with little effect on load",
    2: "warm afternoons lifted air conditioning load slightly",
    3: "hot and humid spells pushed demand above seasonal norms",
    4: "a heatwave with humid nights stretched the network",
    5: "a heatwave ended in a severe storm that tripped lines, humid air lingered",
}
RULE_TABLE_TOML = """base = 1

[weights]
warm = 1
hot = 1
humid = 1
heatwave = 2
storm = 1
"""

# Log-variance loadings of the planted drivers
VARIANCE_PERSISTENCE = 0.5
WEATHER_LOADING = 0.45
SUPPLY_DEMAND_LOADING = 0.45
REGIONAL_LOADING = 0.45
RATING_LOADING = 0.45
JUMP_FEEDBACK = 0.4
VARIANCE_NOISE = 0.1
DRIVER_PERSISTENCE = 0.3
MIN_SEVERITY_CHANGE = 2


@dataclass(frozen=True)
class FixturePaths:
    config: Path
    prices: Path
    exogenous: Path
    corpus: Path
    rule_table: Path


def generate_fixture(out_dir: Path, days: int = 400, seed: int = 0, start: date = FIXTURE_START) -> FixturePaths:
    """
    Write a self-contained synthetic data set and a configuration running
    the whole pipeline on it.

    Every exogenous group, the monthly weather severity and the previous
    day's jumps drive the next day's variance, so each feature group carries
    forecasting signal the others cannot stand in for. The weather
    reports describe each month's severity with the keywords of the bundled
    rule table.

    Args:
            out_dir (Path): Target directory, created when missing.
            days (int): Number of consecutive trading days.
            seed (int): Seed of every random draw.
            start (date): First day.

    Returns:
            FixturePaths: Locations of the written files.
    """
    if days < MIN_FIXTURE_DAYS:
        raise ConfigValidationError(f"A fixture needs at least {MIN_FIXTURE_DAYS} days, got {days}")
    rng = np.random.default_rng(seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    day_list = [start + timedelta(days=offset) for offset in range(days)]

    severity = _monthly_severity(day_list, rng)
    drivers, exogenous = _exogenous_factors(day_list, severity, rng)
    jump_counts = rng.poisson(JUMP_INTENSITY, days)
    variances = _daily_variances(drivers, jump_counts, rng)
    prices, demand, supply = _intraday_prices(day_list, variances, jump_counts, exogenous, rng)

    paths = FixturePaths(
        config=Path(out_dir, "faep.toml"),
        prices=Path(out_dir, "prices.csv"),
        exogenous=Path(out_dir, "exogenous.csv"),
        corpus=Path(out_dir, "corpus"),
        rule_table=Path(out_dir, "rules.toml"),
    )
    _write_prices(paths.prices, day_list, prices, demand, supply)
    _write_exogenous(paths.exogenous, day_list, exogenous)
    _write_corpus(paths.corpus, severity)
    paths.rule_table.write_text(RULE_TABLE_TOML, encoding="utf-8")
    paths.config.write_text(_config_text(day_list), encoding="utf-8")
    logger.info("Synthetic fixture of %d days written to %s", days, out_dir)
    return paths


# PRIVATE FUNCTIONS
def _monthly_severity(days: List[date], rng: np.random.Generator) -> Dict[Tuple[int, int], int]:
    """
    Random 1..5 severities, each month at least MIN_SEVERITY_CHANGE away
    from the previous one.
    """
    severity: Dict[Tuple[int, int], int] = {}
    previous = None
    for month in dict.fromkeys((day.year, day.month) for day in days):
        choices = [level for level in range(1, 6) if previous is None or abs(level - previous) >= MIN_SEVERITY_CHANGE]
        previous = int(rng.choice(choices))
        severity[month] = previous
    return severity


def _exogenous_factors(
    days: List[date], severity: Dict[Tuple[int, int], int], rng: np.random.Generator
) -> Tuple[Dict[str, np.ndarray], Dict[str, np.ndarray]]:
    n = len(days)
    season = np.array([np.cos(2 * np.pi * (day.timetuple().tm_yday - 15) / 365.25) for day in days])
    rating = np.array([severity[(day.year, day.month)] for day in days], dtype=float)

    weather = _ar1(n, DRIVER_PERSISTENCE, rng)
    supply_demand = _ar1(n, DRIVER_PERSISTENCE, rng)
    regional = _ar1(n, DRIVER_PERSISTENCE, rng)

    exogenous = {
        "air_temp_c": 22 + 6 * season + 3 * weather + rng.normal(0, 0.5, n),
        "wind_speed_ms": 5 + 1.5 * np.abs(weather) + rng.gamma(2.0, 0.5, n),
        "rel_humidity_pct": np.clip(60 + 8 * weather + rng.normal(0, 3, n), 5, 100),
        "mslp_hpa": 1013 - 4 * weather + rng.normal(0, 1.5, n),
        "demand_mw": 8000 + 900 * supply_demand + 300 * season + rng.normal(0, 80, n),
        "supply_mw": 9500 - 500 * supply_demand + rng.normal(0, 80, n),
        "retail_price": 230 + 5 * supply_demand + rng.normal(0, 1, n),
        "price_vic": PRICE_LEVEL + 12 * regional + rng.normal(0, 2, n),
        "price_qld": PRICE_LEVEL + 10 * regional + rng.normal(0, 2, n),
        "price_sa": PRICE_LEVEL + 20 * regional + rng.normal(0, 3, n),
        "price_tas": PRICE_LEVEL + 4 * regional + rng.normal(0, 2, n),
    }
    drivers = {"weather": weather, "supply_demand": supply_demand, "regional": regional, "rating": (rating - 3) / 1.4}
    return drivers, exogenous


def _ar1(n: int, phi: float, rng: np.random.Generator) -> np.ndarray:
    values = np.empty(n)
    values[0] = rng.normal()
    for t in range(1, n):
        values[t] = phi * values[t - 1] + np.sqrt(1 - phi**2) * rng.normal()
    return values


def _daily_variances(drivers: Dict[str, np.ndarray], jump_counts: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """
    Log-variance of day t follows an AR(1) pulled by the drivers and the
    jumps of day t - 1.
    """
    n = len(drivers["weather"])
    mean_log_variance = np.log(4.0)
    log_variance = np.empty(n)
    log_variance[0] = mean_log_variance
    for t in range(1, n):
        push = (
            WEATHER_LOADING * drivers["weather"][t - 1]
            + SUPPLY_DEMAND_LOADING * drivers["supply_demand"][t - 1]
            + REGIONAL_LOADING * drivers["regional"][t - 1]
            + RATING_LOADING * drivers["rating"][t - 1]
            + JUMP_FEEDBACK * min(int(jump_counts[t - 1]), 1)
        )
        log_variance[t] = (
            mean_log_variance
            + VARIANCE_PERSISTENCE * (log_variance[t - 1] - mean_log_variance)
            + push
            + VARIANCE_NOISE * rng.normal()
        )
    return np.exp(log_variance)


def _intraday_prices(
    days: List[date],
    variances: np.ndarray,
    jump_counts: np.ndarray,
    exogenous: Dict[str, np.ndarray],
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    slots = SLOTS_PER_DAY
    diurnal = 2 * np.sin(np.linspace(-np.pi / 2, 3 * np.pi / 2, slots)) + np.exp(
        -0.5 * ((np.arange(slots) - 36) / 3) ** 2
    )
    prices = np.empty((len(days), slots))
    level = PRICE_LEVEL
    for row, (variance, jumps) in enumerate(zip(variances, jump_counts)):
        increments = rng.normal(0.0, np.sqrt(variance / (slots - 1)), slots)
        increments[0] = 0.0
        for _ in range(jumps):
            increments[rng.integers(1, slots)] += rng.choice((-1.0, 1.0)) * rng.uniform(2.5, 4.0) * np.sqrt(variance)
        path = level + np.cumsum(increments)
        prices[row] = path + diurnal - diurnal[0]
        level = PRICE_LEVEL + 0.5 * (path[-1] - PRICE_LEVEL)

    nonpositive = rng.random(prices.shape) < NONPOSITIVE_PROBABILITY
    nonpositive[:, 0] = False
    prices[nonpositive] = -rng.uniform(0.0, 10.0, int(nonpositive.sum()))

    demand = exogenous["demand_mw"][:, None] * (1 + 0.1 * np.sin(np.linspace(0, 2 * np.pi, slots)))[None, :]
    supply = exogenous["supply_mw"][:, None] * np.ones(slots)[None, :]
    return np.round(prices, 4), np.round(demand, 1), np.round(supply, 1)


def _write_prices(path: Path, days: List[date], prices: np.ndarray, demand: np.ndarray, supply: np.ndarray) -> None:
    minutes_per_slot = 24 * 60 // SLOTS_PER_DAY
    timestamps = [
        (datetime.combine(day, datetime.min.time()) + timedelta(minutes=slot * minutes_per_slot)).strftime(
            "%Y-%m-%dT%H:%M"
        )
        for day in days
        for slot in range(SLOTS_PER_DAY)
    ]
    pd.DataFrame(
        {
            "timestamp": timestamps,
            "region": MARKET_REGION,
            "price": prices.reshape(-1),
            "demand": demand.reshape(-1),
            "supply": supply.reshape(-1),
        }
    ).to_csv(path, index=False, lineterminator="\n")


def _write_exogenous(path: Path, days: List[date], exogenous: Dict[str, np.ndarray]) -> None:
    frame = pd.DataFrame({"date": [day.isoformat() for day in days]})
    for name, values in exogenous.items():
        frame[name] = np.round(values, 3)
    frame.to_csv(path, index=False, lineterminator="\n")


def _write_corpus(directory: Path, severity: Dict[Tuple[int, int], int]) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    years = sorted({year for year, _ in severity})
    for year in years:
        lines = [f"Weather review of New South Wales for {year}."]
        for (month_year, month), level in sorted(severity.items()):
            if month_year == year:
                lines.append(f"In {calendar.month_name[month]} {year} {SEVERITY_SENTENCES[level]}.")
        Path(directory, f"{year}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def _config_text(days: List[date]) -> str:
    train_end = days[int(len(days) * 0.60)]
    validation_end = days[int(len(days) * 0.75)]
    return f"""seed = 0
out_dir = "faep_out"

[data]
prices = "prices.csv"
exogenous = "exogenous.csv"
corpus = "corpus"
rule_table = "rules.toml"

[split]
train_end = {train_end.isoformat()}
validation_end = {validation_end.isoformat()}

[features]
target = "ln"
sfs_budget = 10

[kpca]
kernel = "rbf"
variance_share = 0.95
mode = "augment"

[models.garch]
min_observations = 150

[models.gbt]
n_rounds = 80
max_depth = 3
learning_rate = 0.05
min_samples_leaf = 5

[models.lstm]
hidden_size = 8
sequence_length = 10
batch_size = 32
step_size = 0.005
epochs = 40
patience = 10

[provider]
kind = "offline"
cache_file = "cache/ratings_cache.jsonl"

[rating]
granularity = "month"

[backtest]
refit_cadence = 20
segment_size = 20
"""
