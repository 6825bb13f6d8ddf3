"""Per-component stability classification.

Every comparison is inclusive. A component whose measure is unavailable
gets a verdict with a single failing ``missing`` criterion, so callers can
tell "not measurable" apart from "measured and failed".
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Optional

from .metrics import DENOMINATORS, GRANULARITIES, TENDENCIES, MetricVector

COMPONENTS = ("commit", "issue", "pull", "activity")


@dataclass(frozen=True)
class StabilityThresholds:
    alpha_c: float = 0.5
    beta_i: float = 0.3
    tau_i: float = 14.0
    beta_p: float = 0.4
    tau_p: float = 5.0
    gamma_a: float = 0.25
    delta_a: float = 0.15

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not value >= 0:
                raise ValueError(f"threshold {f.name} must be >= 0, got {value!r}")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class Regime:
    commit_granularity: str = "weekly"
    tendency: str = "median"
    denom: str = "windowed"

    def __post_init__(self):
        if self.commit_granularity not in GRANULARITIES:
            raise ValueError(f"unknown granularity {self.commit_granularity!r}")
        if self.tendency not in TENDENCIES:
            raise ValueError(f"unknown tendency {self.tendency!r}")
        if self.denom not in DENOMINATORS:
            raise ValueError(f"unknown denominator mode {self.denom!r}")

    @classmethod
    def named(cls, name: str) -> "Regime":
        try:
            return PRESETS[name]
        except KeyError:
            raise ValueError(f"unknown regime {name!r}; expected one of {sorted(PRESETS)}") from None

    @property
    def name(self) -> str:
        for key, preset in PRESETS.items():
            if preset == self:
                return key
        return "custom"

    def to_dict(self):
        return {"name": self.name, **asdict(self)}


PRESETS = {
    "original": Regime("daily", "mean", "cumulative"),
    "revised": Regime("weekly", "median", "windowed"),
}
ORIGINAL = PRESETS["original"]
REVISED = PRESETS["revised"]


@dataclass(frozen=True)
class Criterion:
    name: str
    threshold: Optional[float]
    measured: Optional[float]
    passed: bool
    op: str = ""


@dataclass(frozen=True)
class ComponentVerdict:
    component: str
    stable: bool
    measured: Optional[float]
    criteria: tuple = ()

    @property
    def missing(self) -> bool:
        return any(c.name == "missing" for c in self.criteria)

    @property
    def status(self) -> str:
        if self.missing:
            return "missing"
        return "stable" if self.stable else "unstable"

    def to_dict(self):
        return {
            "component": self.component,
            "stable": self.stable,
            "status": self.status,
            "measured": self.measured,
            "criteria": [asdict(c) for c in self.criteria],
        }

    @classmethod
    def from_dict(cls, doc):
        return cls(
            component=doc["component"], stable=bool(doc["stable"]), measured=doc.get("measured"),
            criteria=tuple(Criterion(**c) for c in doc.get("criteria", ())),
        )


def _at_most(name, measured, bound):
    return Criterion(name, bound, measured, measured <= bound, "<=")


def _at_least(name, measured, bound):
    return Criterion(name, bound, measured, measured >= bound, ">=")


def _verdict(component, measured, *criteria):
    return ComponentVerdict(component, all(c.passed for c in criteria), measured, tuple(criteria))


def missing_verdict(component: str, reason: str = "") -> ComponentVerdict:
    return ComponentVerdict(component, False, None, (Criterion("missing", None, None, False, reason),))


def classify_commit(cv: float, thresholds: StabilityThresholds = StabilityThresholds()) -> ComponentVerdict:
    return _verdict("commit", cv, _at_most("cv", cv, thresholds.alpha_c))


def classify_issue(ratio: float, time_days: float, thresholds: StabilityThresholds = StabilityThresholds()):
    return _verdict(
        "issue", ratio,
        _at_least("ratio", ratio, thresholds.beta_i),
        _at_most("time_days", time_days, thresholds.tau_i),
    )


def classify_pull(ratio: float, time_days: float, thresholds: StabilityThresholds = StabilityThresholds()):
    return _verdict(
        "pull", ratio,
        _at_least("ratio", ratio, thresholds.beta_p),
        _at_most("time_days", time_days, thresholds.tau_p),
    )


def classify_activity(a: float, active_user_ratio: float, thresholds: StabilityThresholds = StabilityThresholds()):
    return _verdict(
        "activity", a,
        _at_least("a", a, thresholds.gamma_a),
        _at_least("active_user_ratio", active_user_ratio, thresholds.delta_a),
    )


def classify_all(metrics: MetricVector, regime: Regime = REVISED,
                 thresholds: StabilityThresholds = StabilityThresholds()) -> list:
    """One verdict per component, in ``COMPONENTS`` order."""
    cv = metrics.cv(regime.commit_granularity)
    return [
        classify_commit(cv, thresholds) if cv is not None
        else missing_verdict("commit", "insufficient activity"),
        classify_issue(metrics.i_ratio, metrics.i_time, thresholds) if metrics.i_ratio is not None
        else missing_verdict("issue", "no issues"),
        classify_pull(metrics.p_ratio, metrics.p_time, thresholds) if metrics.p_ratio is not None
        else missing_verdict("pull", "no pull requests"),
        classify_activity(metrics.a, metrics.active_user_ratio, thresholds) if metrics.a is not None
        else missing_verdict("activity", "no open items"),
    ]


def combine_sweep(per_window: list) -> list:
    """Fold verdict lists from consecutive sub-windows into one list.

    A component is stable only if it is stable in every sub-window.
    Criteria are kept with an ``@k`` suffix naming the sub-window.
    """
    if not per_window:
        raise ValueError("need at least one sub-window")
    out = []
    for column in zip(*per_window):
        component = column[0].component
        criteria = tuple(
            Criterion(f"{c.name}@{k}", c.threshold, c.measured, c.passed, c.op)
            for k, verdict in enumerate(column) for c in verdict.criteria
        )
        if any(v.missing for v in column):
            criteria += (Criterion("missing", None, None, False, "missing in a sub-window"),)
        first_bad = next((v for v in column if not v.stable), column[-1])
        out.append(ComponentVerdict(component, all(c.passed for c in criteria), first_bad.measured, criteria))
    return out
