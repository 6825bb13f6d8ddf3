"""Input checks and conversions used by the estimator layer."""
from __future__ import annotations

import math
from collections.abc import Mapping

import numpy as np

from .csi import NormalizerParams, Weights
from .ingestion.records import EventSet
from .metrics import FEATURES, MetricVector
from .stability import Regime, StabilityThresholds


def check_regime(regime) -> Regime:
    if isinstance(regime, Regime):
        return regime
    if isinstance(regime, str):
        return Regime.named(regime)
    if isinstance(regime, Mapping):
        return Regime(**{k: v for k, v in regime.items() if k != "name"})
    raise TypeError(f"cannot interpret {regime!r} as a regime")


def check_thresholds(thresholds) -> StabilityThresholds:
    if thresholds is None:
        return StabilityThresholds()
    if isinstance(thresholds, StabilityThresholds):
        return thresholds
    return StabilityThresholds(**dict(thresholds))


def check_params(params) -> NormalizerParams:
    if params is None:
        return NormalizerParams()
    if isinstance(params, NormalizerParams):
        return params
    return NormalizerParams.from_dict(dict(params))


def check_weights(weights) -> Weights:
    if weights is None:
        return Weights()
    if isinstance(weights, Weights):
        return weights
    if isinstance(weights, str):
        return Weights.parse(weights)
    if isinstance(weights, Mapping):
        return Weights(**weights)
    return Weights(*[float(w) for w in weights])


def check_event_sets(X) -> list:
    if isinstance(X, EventSet):
        raise TypeError("expected a sequence of EventSet, got a single EventSet")
    items = list(X)
    for n, item in enumerate(items):
        if not isinstance(item, EventSet):
            raise TypeError(f"item {n} is {type(item).__name__}, expected EventSet")
    return items


def _opt(value):
    return None if value is None or (isinstance(value, float) and math.isnan(value)) else float(value)


def metric_matrix(vectors) -> np.ndarray:
    """Stack metric vectors into an ``(n, len(FEATURES))`` array, NaN for missing."""
    rows = [[np.nan if getattr(v, f) is None else getattr(v, f) for f in FEATURES] for v in vectors]
    return np.asarray(rows, dtype=float).reshape(len(rows), len(FEATURES))


def vector_from_row(row, tendency="median", denom="windowed") -> MetricVector:
    values = dict(zip(FEATURES, (_opt(x) for x in row)))

    def full(ratio, time):
        return None if ratio is None or time is None else ratio / (1.0 + time)

    mean = tendency == "mean"
    return MetricVector(
        c=values["c"], cv_daily=values["cv_daily"], cv_weekly=values["cv_weekly"],
        i_ratio=values["i_ratio"], i_time=values["i_time"], i_full=full(values["i_ratio"], values["i_time"]),
        p_ratio=values["p_ratio"], p_time=values["p_time"], p_full=full(values["p_ratio"], values["p_time"]),
        a=values["a"], active_user_ratio=values["active_user_ratio"] or 0.0,
        mean_resolution_days=values["i_time"] if mean else None,
        median_resolution_days=None if mean else values["i_time"],
        mean_review_days=values["p_time"] if mean else None,
        median_review_days=None if mean else values["p_time"],
        tendency=tendency, denom=denom,
    )


def check_metric_input(X, regime: Regime) -> list:
    """Accept metric vectors or a feature matrix; return metric vectors."""
    if isinstance(X, MetricVector):
        raise TypeError("expected a sequence of MetricVector, got a single MetricVector")
    if hasattr(X, "to_numpy") and not isinstance(X, np.ndarray):
        X = X.to_numpy()
    if isinstance(X, np.ndarray):
        if X.ndim != 2 or X.shape[1] != len(FEATURES):
            raise ValueError(f"expected shape (n, {len(FEATURES)}), got {X.shape}")
        X = X.astype(float)
        finite_or_nan = np.isfinite(X) | np.isnan(X)
        if not finite_or_nan.all() or (X[~np.isnan(X)] < 0).any():
            raise ValueError("metric features must be finite and non-negative (NaN marks missing)")
        return [vector_from_row(row, regime.tendency, regime.denom) for row in X]
    items = list(X)
    if items and all(isinstance(v, MetricVector) for v in items):
        return items
    if not items:
        return []
    return check_metric_input(np.asarray(items, dtype=float), regime)
