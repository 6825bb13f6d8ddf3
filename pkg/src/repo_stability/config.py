"""Run configuration: defaults, JSON config files, and params files.

Precedence is command-line flags, then the config file, then defaults.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from ._time import format_utc, to_utc
from .csi import MISSING_POLICIES, NormalizerParams, Weights
from .ingestion.source import DEFAULT_TOKEN_ENV, default_cache_dir
from .stability import Regime, StabilityThresholds
from .window import AnalysisWindow

OUTPUT_FORMATS = ("json", "csv")


@dataclass(frozen=True)
class RunConfig:
    repos: tuple = ()
    fixtures: tuple = ()
    window_years: int = 5
    window_end: Optional[str] = None
    window_start: Optional[str] = None
    regime: str = "revised"
    thresholds: StabilityThresholds = StabilityThresholds()
    params: NormalizerParams = NormalizerParams()
    weights: Weights = Weights()
    missing_policy: str = "zero"
    output_format: str = "json"
    cache_dir: str = field(default_factory=lambda: str(default_cache_dir()))
    token_env: str = DEFAULT_TOKEN_ENV
    jobs: int = 1
    sweep_days: Optional[int] = None
    sigma_floor: float = 0.01

    def __post_init__(self):
        Regime.named(self.regime)
        if self.missing_policy not in MISSING_POLICIES:
            raise ValueError(f"missing_policy must be one of {MISSING_POLICIES}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"output_format must be one of {OUTPUT_FORMATS}")
        if self.window_years <= 0:
            raise ValueError("window_years must be positive")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    @property
    def regime_obj(self) -> Regime:
        return Regime.named(self.regime)

    def window(self, now=None) -> AnalysisWindow:
        if self.window_end is None:
            window = AnalysisWindow.default(now, self.window_years)
        else:
            window = AnalysisWindow.ending_at(self.window_end, self.window_years)
        if self.window_start is not None:
            window = window.shift_start(self.window_start)
        return window

    def effective(self) -> dict:
        """The settings that influence results, as a JSON-ready dict."""
        return {
            "window_years": self.window_years,
            "window_end": None if self.window_end is None else format_utc(to_utc(self.window_end)),
            "window_start": None if self.window_start is None else format_utc(to_utc(self.window_start)),
            "regime": self.regime_obj.to_dict(),
            "thresholds": self.thresholds.to_dict(),
            "params": self.params.to_dict(),
            "weights": self.weights.to_list(),
            "missing_policy": self.missing_policy,
            "sweep_days": self.sweep_days,
        }

    def to_dict(self) -> dict:
        return {
            **self.effective(),
            "regime": self.regime,
            "repos": list(self.repos),
            "fixtures": list(self.fixtures),
            "output_format": self.output_format,
            "cache_dir": self.cache_dir,
            "token_env": self.token_env,
            "jobs": self.jobs,
            "sigma_floor": self.sigma_floor,
        }


def params_from_document(doc: dict, base: Optional[NormalizerParams] = None) -> NormalizerParams:
    """Read a params file; accepts bare bands or a calibration document."""
    if "params" in doc and isinstance(doc["params"], dict):
        doc = doc["params"]
    return NormalizerParams.from_dict(doc, base)


def load_params(path, base: Optional[NormalizerParams] = None) -> NormalizerParams:
    return params_from_document(json.loads(Path(path).read_text(encoding="utf-8")), base)


def dump_params(params: NormalizerParams) -> str:
    return json.dumps(params.to_dict(), indent=2, sort_keys=True) + "\n"


def config_from_dict(doc: dict, base: RunConfig = RunConfig()) -> RunConfig:
    changes = {}
    simple = ("window_years", "window_end", "window_start", "missing_policy", "output_format",
              "cache_dir", "token_env", "jobs", "sweep_days", "sigma_floor")
    for key in simple:
        if key in doc:
            changes[key] = doc[key]
    if "regime" in doc:
        regime = doc["regime"]
        changes["regime"] = regime["name"] if isinstance(regime, dict) else regime
    if "repos" in doc:
        changes["repos"] = tuple(doc["repos"])
    if "fixtures" in doc:
        changes["fixtures"] = tuple(doc["fixtures"])
    if "thresholds" in doc:
        changes["thresholds"] = replace(base.thresholds, **doc["thresholds"])
    if "params" in doc:
        changes["params"] = NormalizerParams.from_dict(doc["params"], base.params)
    if "weights" in doc:
        w = doc["weights"]
        changes["weights"] = Weights.parse(w) if isinstance(w, str) else (
            Weights(**w) if isinstance(w, dict) else Weights(*w))
    return replace(base, **changes)


def load_config(path, base: RunConfig = RunConfig()) -> RunConfig:
    return config_from_dict(json.loads(Path(path).read_text(encoding="utf-8")), base)
