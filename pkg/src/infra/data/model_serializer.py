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
import math
from typing import Any, Dict, Optional

import numpy as np

from src.config import MODEL_FORMAT_VERSION
from src.domain.errors import DataError
from src.domain.forecasting.forecasting_data_objects import (
    EnsembleModel,
    GarchModel,
    GbtModel,
    GbtParams,
    HarModel,
    LstmModel,
    LstmParams,
    LstmWeights,
    TreeNode,
)

HAR_KIND = "har"
GARCH_KIND = "garch"
GBT_KIND = "gbt"
LSTM_KIND = "lstm"
ENSEMBLE_KIND = "ensemble"


def model_to_document(model: Any) -> Dict[str, Any]:
    """
    JSON-ready form of a fitted model, tagged with its kind and the format
    version. Arrays become nested lists, non-finite floats become null.
    """
    return {"format_version": MODEL_FORMAT_VERSION, **_encode(model)}


def model_from_document(document: Dict[str, Any]) -> Any:
    version = document.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise DataError(f"Unsupported model format version {version}, expected {MODEL_FORMAT_VERSION}")
    return _decode(document)


# PRIVATE FUNCTIONS
def _encode(model: Any) -> Dict[str, Any]:
    if isinstance(model, HarModel):
        return {"kind": HAR_KIND, **_floats(dataclasses.asdict(model))}
    if isinstance(model, GarchModel):
        return {"kind": GARCH_KIND, **_floats(dataclasses.asdict(model))}
    if isinstance(model, GbtModel):
        return {
            "kind": GBT_KIND,
            "trees": [_encode_tree(tree) for tree in model.trees],
            "learning_rate": model.learning_rate,
            "base_prediction": _float(model.base_prediction),
            "params": dataclasses.asdict(model.params),
            "feature_names": list(model.feature_names),
            "training_losses": [_float(loss) for loss in model.training_losses],
        }
    if isinstance(model, LstmModel):
        return {
            "kind": LSTM_KIND,
            "weights": {name: _floats(np.asarray(value).tolist()) for name, value in model.weights.as_dict().items()},
            "params": dataclasses.asdict(model.params),
            "feature_names": list(model.feature_names),
            "input_mean": _floats(model.input_mean.tolist()),
            "input_std": _floats(model.input_std.tolist()),
            "target_mean": _float(model.target_mean),
            "target_std": _float(model.target_std),
            "best_epoch": model.best_epoch,
            "history": [_float(loss) for loss in model.history],
        }
    if isinstance(model, EnsembleModel):
        return {
            "kind": ENSEMBLE_KIND,
            "gbt": _encode(model.gbt) if model.gbt is not None else None,
            "lstm": _encode(model.lstm) if model.lstm is not None else None,
            "epsilon1": _float(model.epsilon1),
            "epsilon2": _float(model.epsilon2),
            "omega1": model.omega1,
            "omega2": model.omega2,
            "feature_names": list(model.feature_names),
        }
    raise DataError(f"Cannot serialize a {type(model).__name__}")


def _decode(document: Dict[str, Any]) -> Any:
    kind = document.get("kind")
    if kind == HAR_KIND:
        return HarModel(
            variant=document["variant"],
            coefficients={name: _nan(value) for name, value in document["coefficients"].items()},
            standard_errors={name: _nan(value) for name, value in document["standard_errors"].items()},
            r_squared=_nan(document["r_squared"]),
            residual_variance=_nan(document["residual_variance"]),
            feature_names=tuple(document["feature_names"]),
            n_observations=document["n_observations"],
        )
    if kind == GARCH_KIND:
        fields = [field.name for field in dataclasses.fields(GarchModel)]
        return GarchModel(
            **{name: _nan(document[name]) if name != "n_observations" else document[name] for name in fields}
        )
    if kind == GBT_KIND:
        return GbtModel(
            trees=tuple(_decode_tree(tree) for tree in document["trees"]),
            learning_rate=document["learning_rate"],
            base_prediction=_nan(document["base_prediction"]),
            params=GbtParams(**document["params"]),
            feature_names=tuple(document["feature_names"]),
            training_losses=tuple(_nan(loss) for loss in document["training_losses"]),
        )
    if kind == LSTM_KIND:
        weights = document["weights"]
        return LstmModel(
            weights=LstmWeights(
                w=_array(weights["w"]),
                u=_array(weights["u"]),
                b=_array(weights["b"]),
                head_w=_array(weights["head_w"]),
                head_b=_nan(weights["head_b"]),
            ),
            params=LstmParams(**document["params"]),
            feature_names=tuple(document["feature_names"]),
            input_mean=_array(document["input_mean"]),
            input_std=_array(document["input_std"]),
            target_mean=_nan(document["target_mean"]),
            target_std=_nan(document["target_std"]),
            best_epoch=document["best_epoch"],
            history=tuple(_nan(loss) for loss in document["history"]),
        )
    if kind == ENSEMBLE_KIND:
        return EnsembleModel(
            gbt=_decode(document["gbt"]) if document["gbt"] is not None else None,
            lstm=_decode(document["lstm"]) if document["lstm"] is not None else None,
            epsilon1=_nan(document["epsilon1"]),
            epsilon2=_nan(document["epsilon2"]),
            omega1=document["omega1"],
            omega2=document["omega2"],
            feature_names=tuple(document["feature_names"]),
        )
    raise DataError(f"Unknown model kind '{kind}'")


def _encode_tree(node: TreeNode) -> Dict[str, Any]:
    if node.is_leaf:
        return {"value": node.value}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _encode_tree(node.left),  # type: ignore[arg-type]
        "right": _encode_tree(node.right),  # type: ignore[arg-type]
    }


def _decode_tree(document: Dict[str, Any]) -> TreeNode:
    if "feature" not in document:
        return TreeNode(value=document["value"])
    return TreeNode(
        feature=document["feature"],
        threshold=document["threshold"],
        left=_decode_tree(document["left"]),
        right=_decode_tree(document["right"]),
    )


def _float(value: float) -> Optional[float]:
    value = float(value)
    return value if math.isfinite(value) else None


def _floats(value: Any) -> Any:
    if isinstance(value, dict):
        return {key: _floats(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_floats(item) for item in value]
    if isinstance(value, float):
        return _float(value)
    return value


def _nan(value: Optional[float]) -> float:
    return math.nan if value is None else float(value)


def _array(values: Any) -> np.ndarray:
    return np.array(_floats_back(values), dtype=float)


def _floats_back(value: Any) -> Any:
    if isinstance(value, list):
        return [_floats_back(item) for item in value]
    return _nan(value)
