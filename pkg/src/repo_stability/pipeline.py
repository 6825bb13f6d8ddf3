"""End-to-end scoring of one EventSet: metrics -> verdicts -> index."""
from __future__ import annotations

from dataclasses import dataclass
from datetime import timedelta
from typing import Optional

from ._time import format_utc
from .csi import CsiResult, NormalizerParams, Weights, evaluate
from .ingestion.records import EventSet
from .metrics import MetricVector, compute_metrics
from .stability import REVISED, Regime, StabilityThresholds, classify_all, combine_sweep
from .window import AnalysisWindow


@dataclass(frozen=True)
class RepoAnalysis:
    repo: str
    window: AnalysisWindow
    regime: Regime
    metrics: MetricVector
    verdicts: tuple
    result: CsiResult

    def verdict(self, component):
        return next(v for v in self.verdicts if v.component == component)

    def to_dict(self) -> dict:
        return {
            "repo": self.repo,
            "status": "ok",
            "window": {"start": format_utc(self.window.start), "end": format_utc(self.window.end)},
            "regime": self.regime.to_dict(),
            "metrics": self.metrics.to_dict(),
            "verdicts": [v.to_dict() for v in self.verdicts],
            "csi": self.result.to_dict(),
        }


def sub_windows(window: AnalysisWindow, length: timedelta) -> list:
    """Consecutive sub-windows of ``length``; a trailing remainder is dropped."""
    n = window.duration // length
    return [AnalysisWindow(window.start + k * length, window.start + (k + 1) * length) for k in range(n)]


def analyze_events(
    events: EventSet,
    window: AnalysisWindow,
    regime: Regime = REVISED,
    thresholds: StabilityThresholds = StabilityThresholds(),
    params: NormalizerParams = NormalizerParams(),
    weights: Weights = Weights(),
    missing_policy: str = "zero",
    sweep: Optional[timedelta] = None,
) -> RepoAnalysis:
    """Score ``events`` over ``window``.

    With ``sweep`` set, stability must hold in every consecutive sub-window
    of that length; the index itself is still computed over the whole window.
    """
    metrics = compute_metrics(events, window, regime.tendency, regime.denom)
    if sweep is None:
        verdicts = classify_all(metrics, regime, thresholds)
    else:
        parts = sub_windows(window, sweep)
        if not parts:
            raise ValueError("sweep length exceeds the analysis window")
        verdicts = combine_sweep([
            classify_all(compute_metrics(events, w, regime.tendency, regime.denom), regime, thresholds)
            for w in parts
        ])
    result = evaluate(metrics, verdicts, params, weights, missing_policy, regime)
    return RepoAnalysis(str(events.repo), window, regime, metrics, tuple(verdicts), result)
