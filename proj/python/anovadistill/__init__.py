# Copyright 2026 The anovadistill Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Distill a black-box tabular predictor into a functional ANOVA surrogate."""

import json

from ._core import (
    AnovaModel,
    Dataset,
    InvalidArgumentError,
    NumericalError,
    Predictor,
    PredictorError,
    analytic_data,
    analytic_predictor,
    callback_predictor,
    external_predictor,
    load_csv,
    load_model,
    r_squared,
)
from . import _core

__all__ = [
    "AnovaModel",
    "Dataset",
    "InvalidArgumentError",
    "NumericalError",
    "Predictor",
    "PredictorError",
    "analytic_data",
    "analytic_predictor",
    "callback_predictor",
    "external_predictor",
    "fit",
    "interaction_scores",
    "load_csv",
    "load_model",
    "r_squared",
    "screen",
    "total_effects",
]


def _dump(config):
    return json.dumps(config or {})


def _as_sets(sets):
    return [sorted(int(i) for i in j) for j in sets]


def _scores(doc):
    return {tuple(e["j"]): e["score"] for e in json.loads(doc)["scores"]}


def interaction_scores(predictor, data, candidates, config=None):
    """Score index sets; config takes the screening keys (mc, h, bandwidth_mode)."""
    return _scores(_core._interaction_scores(
        predictor, data, _as_sets(candidates), _dump(config), False))


def total_effects(predictor, data, config=None):
    """Order-1 total effects for every feature."""
    return _scores(_core._interaction_scores(
        predictor, data, [[j] for j in range(data.p)], _dump(config), True))


def screen(predictor, data, config=None):
    """Run feature and interaction screening. Returns the screening document
    with R converted to tuples."""
    doc = json.loads(_core._screen(predictor, data, _dump(config)))
    doc["R"] = [tuple(j) for j in doc["R"]]
    return doc


def fit(data, components, predictor=None, targets=None, options=None):
    """Fit the ANOVA surrogate on `components` to the predictor or to targets."""
    if (predictor is None) == (targets is None):
        raise ValueError("pass exactly one of predictor or targets")
    sets = _as_sets(components)
    if predictor is not None:
        return _core._fit(predictor, data, sets, _dump(options))
    return _core._fit_targets(data, targets, sets, _dump(options))
