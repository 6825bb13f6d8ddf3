"""scikit-learn compatible front end.

:class:`MetricExtractor` turns EventSets into a feature matrix and
:class:`StabilityIndex` scores that matrix, so the two compose in a
``sklearn.pipeline.Pipeline``. Fitting a ``StabilityIndex`` with
``calibrate=True`` derives normalizer bands from the stable members of
the training cohort.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .calibration import CALIBRATED_COMPONENTS, DEFAULT_SIGMA_FLOOR, apply_calibration, calibrate
from .csi import component_measures, evaluate
from .exceptions import EmptyCohort
from .metrics import FEATURES, compute_metrics
from .stability import COMPONENTS, classify_all
from .validation import (
    check_event_sets,
    check_metric_input,
    check_params,
    check_regime,
    check_thresholds,
    check_weights,
    metric_matrix,
)
from .window import AnalysisWindow


class MetricExtractor(TransformerMixin, BaseEstimator):
    """Compute per-repository metric features from EventSets.

    Parameters
    ----------
    window_end : datetime or str, optional
        End of the analysis window. Defaults to the latest UTC midnight at
        fit time.
    window_years : int
        Window length in years, used when ``window_start`` is not given.
    window_start : datetime or str, optional
        Explicit window start.
    regime : str or Regime
        Controls the estimator (mean/median) and denominator mode.
    """

    def __init__(self, window_end=None, window_years=5, window_start=None, regime="revised"):
        self.window_end = window_end
        self.window_years = window_years
        self.window_start = window_start
        self.regime = regime

    def _resolve_window(self):
        if self.window_end is None:
            window = AnalysisWindow.default(years=self.window_years)
        else:
            window = AnalysisWindow.ending_at(self.window_end, self.window_years)
        if self.window_start is not None:
            window = window.shift_start(self.window_start)
        return window

    def fit(self, X=None, y=None):
        if X is not None:
            check_event_sets(X)
        self.window_ = self._resolve_window()
        self.regime_ = check_regime(self.regime)
        self.n_features_out_ = len(FEATURES)
        return self

    def transform_records(self, X):
        check_is_fitted(self, "window_")
        return [
            compute_metrics(events, self.window_, self.regime_.tendency, self.regime_.denom)
            for events in check_event_sets(X)
        ]

    def transform(self, X):
        return metric_matrix(self.transform_records(X))

    def get_feature_names_out(self, input_features=None):
        return np.asarray(FEATURES, dtype=object)


class StabilityIndex(BaseEstimator):
    """Composite stability index over metric features.

    ``transform`` returns the four per-component scores, ``predict`` the
    index, and ``classify`` the per-component stability verdicts as a
    boolean matrix. Columns follow ``COMPONENTS``.
    """

    def __init__(self, regime="revised", thresholds=None, params=None, weights=None,
                 missing_policy="zero", calibrate=False, sigma_floor=DEFAULT_SIGMA_FLOOR):
        self.regime = regime
        self.thresholds = thresholds
        self.params = params
        self.weights = weights
        self.missing_policy = missing_policy
        self.calibrate = calibrate
        self.sigma_floor = sigma_floor

    def fit(self, X, y=None):
        self.regime_ = check_regime(self.regime)
        self.thresholds_ = check_thresholds(self.thresholds)
        self.weights_ = check_weights(self.weights)
        if self.missing_policy not in ("zero", "renormalize"):
            raise ValueError(f"missing_policy must be 'zero' or 'renormalize', got {self.missing_policy!r}")
        base = check_params(self.params)
        vectors = check_metric_input(X, self.regime_)
        self.n_features_in_ = len(FEATURES)
        self.calibration_ = {}
        self.calibration_errors_ = {}
        if self.calibrate:
            cohorts = {k: [] for k in CALIBRATED_COMPONENTS}
            for n, vec in enumerate(vectors):
                verdicts = {v.component: v for v in classify_all(vec, self.regime_, self.thresholds_)}
                measures = component_measures(vec, self.regime_)
                for component in CALIBRATED_COMPONENTS:
                    cohorts[component].append((n, measures[component], verdicts[component]))
            for component, rows in cohorts.items():
                try:
                    self.calibration_[component] = calibrate(component, rows)
                except EmptyCohort as exc:
                    self.calibration_errors_[component] = str(exc)
            base = apply_calibration(base, self.calibration_.values(), self.sigma_floor)
        self.params_ = base
        return self

    def evaluate(self, X):
        check_is_fitted(self, "params_")
        out = []
        for vec in check_metric_input(X, self.regime_):
            verdicts = classify_all(vec, self.regime_, self.thresholds_)
            out.append(evaluate(vec, verdicts, self.params_, self.weights_, self.missing_policy, self.regime_))
        return out

    def transform(self, X):
        return np.asarray([r.phis for r in self.evaluate(X)], dtype=float).reshape(-1, len(COMPONENTS))

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)

    def predict(self, X):
        return np.asarray([r.score for r in self.evaluate(X)], dtype=float)

    def classify(self, X):
        check_is_fitted(self, "params_")
        rows = [
            [v.stable for v in classify_all(vec, self.regime_, self.thresholds_)]
            for vec in check_metric_input(X, self.regime_)
        ]
        return np.asarray(rows, dtype=bool).reshape(-1, len(COMPONENTS))

    def get_feature_names_out(self, input_features=None):
        return np.asarray([f"phi_{k}" for k in COMPONENTS], dtype=object)
