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

import importlib.metadata
from datetime import date
from enum import Enum, IntEnum

VERSION = importlib.metadata.version("faep")

# Market data
SLOTS_PER_DAY: int = 48
MARKET_REGION = "NSW"

# Realized measures
JUMP_ALPHA: float = 0.01

# HAR windows (trading days)
HAR_WEEKLY_WINDOW: int = 5
HAR_MONTHLY_WINDOW: int = 22

# Feature selection and reduction
SFS_BUDGET: int = 30
SFS_RIDGE_LAMBDA: float = 1e-3
KPCA_VARIANCE_SHARE: float = 0.95
KPCA_EIGEN_FLOOR: float = 1e-10

# Gradient boosting
GBT_N_ROUNDS: int = 200
GBT_MAX_DEPTH: int = 3
GBT_LEARNING_RATE: float = 0.05
GBT_MIN_SAMPLES_LEAF: int = 5
GBT_SUBSAMPLE: float = 0.8

# LSTM
LSTM_HIDDEN_SIZE: int = 32
LSTM_SEQUENCE_LENGTH: int = 22
LSTM_BATCH_SIZE: int = 32
LSTM_STEP_SIZE: float = 1e-3
LSTM_CLIP_NORM: float = 5.0
LSTM_EPOCHS: int = 300
LSTM_PATIENCE: int = 20

# Ensemble stacking
STACKING_FOLDS: int = 5
EARLY_STOPPING_SHARE: float = 0.2

# GARCH
GARCH_MIN_OBSERVATIONS: int = 300
GARCH_MAX_ITERATIONS: int = 500

# Evaluation
DM_SEGMENT_SIZE: int = 50
DM_SIGNIFICANCE: float = 0.10
DM_MIN_LENGTH: int = 10
REFIT_CADENCE: int = 20

# Weather rating
CHUNK_SIZE: int = 1000
CHUNK_OVERLAP: int = 200
TOP_K_CHUNKS: int = 4
EMBEDDER_DIMENSION: int = 256
EMBEDDER_NGRAM: int = 3
PROMPT_TEMPLATE_VERSION = "v1"

# Default split
DEFAULT_TRAIN_END = date(2016, 6, 30)
DEFAULT_VALIDATION_END = date(2017, 6, 30)

MODEL_FORMAT_VERSION: int = 1


class ExitCode(IntEnum):
    SUCCESS = 0
    FAILURE = 1
    CONFIG_ERROR = 2
    DATA_ERROR = 3
    MODEL_FIT_ERROR = 4
    PROVIDER_ERROR = 5


class Color(Enum):
    GREEN = "#8ce10b"
    YELLOW = "#ffb900"
    ORANGE = "#ff5c0f"
    RED = "#ff000f"
    BLUE = "#008df8"
    WHITE = "#ffffff"
