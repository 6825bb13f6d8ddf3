"""Composite stability index for software repositories."""

__version__ = "0.1.0"

from .calibration import CalibrationResult, apply_calibration, calibrate
from .csi import Band, CsiResult, NormalizerParams, Weights, composite_index, evaluate, triangular_normalize
from .estimators import MetricExtractor, StabilityIndex
from .ingestion import EventSet, RepoRef, load_fixture, save_fixture
from .metrics import (
    MetricVector,
    activity_engagement,
    bin_events,
    coefficient_of_variation,
    commit_frequency,
    compute_metrics,
    issue_resolution_rate,
    pr_merge_rate,
    robust_stats,
)
from .pipeline import RepoAnalysis, analyze_events
from .stability import ORIGINAL, REVISED, ComponentVerdict, Regime, StabilityThresholds, classify_all
from .window import AnalysisWindow

__all__ = [
    "AnalysisWindow", "Band", "CalibrationResult", "ComponentVerdict", "CsiResult", "EventSet",
    "MetricExtractor", "MetricVector", "NormalizerParams", "ORIGINAL", "REVISED", "Regime",
    "RepoAnalysis", "RepoRef", "StabilityIndex", "StabilityThresholds", "Weights",
    "activity_engagement", "analyze_events", "apply_calibration", "bin_events", "calibrate",
    "classify_all", "coefficient_of_variation", "commit_frequency", "composite_index",
    "compute_metrics", "evaluate", "issue_resolution_rate", "load_fixture", "pr_merge_rate",
    "robust_stats", "save_fixture", "triangular_normalize",
]
