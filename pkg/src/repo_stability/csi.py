"""Triangular normalization and the weighted composite index."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .exceptions import InvalidSigma, InvalidWeights
from .metrics import MetricVector
from .stability import COMPONENTS, REVISED, Regime

WEIGHT_TOLERANCE = 1e-12
# Decimal band edges such as 0.40 + 0.10 are not exact in binary; deviations
# within this relative distance of sigma count as on the edge.
EDGE_RTOL = 1e-12
MISSING_POLICIES = ("zero", "renormalize")


def triangular_normalize(x: float, mu: float, sigma: float) -> float:
    """Score ``x`` by its distance from ``mu``: 1 at the apex, 0 at or beyond ``mu +- sigma``."""
    if not sigma > 0:
        raise InvalidSigma(f"sigma must be positive, got {sigma!r}")
    dev = abs(x - mu)
    if dev >= sigma * (1.0 - EDGE_RTOL):
        return 0.0
    return 1.0 - dev / sigma


@dataclass(frozen=True)
class Band:
    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidSigma(f"sigma must be positive, got {self.sigma!r}")

    @property
    def low(self):
        return self.mu - self.sigma

    @property
    def high(self):
        return self.mu + self.sigma

    def score(self, x: float) -> float:
        return triangular_normalize(x, self.mu, self.sigma)


@dataclass(frozen=True)
class NormalizerParams:
    commit: Band = Band(0.25, 0.25)
    issue: Band = Band(0.40, 0.10)
    pull: Band = Band(0.50, 0.10)
    activity: Band = Band(0.35, 0.10)

    def band(self, component: str) -> Band:
        return getattr(self, component)

    def with_band(self, component: str, band: Band) -> "NormalizerParams":
        return replace(self, **{component: band})

    def to_dict(self) -> dict:
        return {k: {"mu": self.band(k).mu, "sigma": self.band(k).sigma} for k in COMPONENTS}

    @classmethod
    def from_dict(cls, doc: dict, base: Optional["NormalizerParams"] = None) -> "NormalizerParams":
        """Read params, keeping ``base`` (default: built-in) for absent components."""
        params = base or cls()
        for component in COMPONENTS:
            if component in doc:
                entry = doc[component]
                params = params.with_band(component, Band(float(entry["mu"]), float(entry["sigma"])))
        return params


@dataclass(frozen=True)
class Weights:
    commit: float = 0.3
    issue: float = 0.25
    pull: float = 0.25
    activity: float = 0.2

    def __post_init__(self):
        values = self.as_tuple()
        if any(not (0.0 <= w <= 1.0) for w in values):
            raise InvalidWeights(f"weights must lie in [0, 1], got {values}")
        if abs(math.fsum(values) - 1.0) > WEIGHT_TOLERANCE:
            raise InvalidWeights(f"weights must sum to 1, got {math.fsum(values)!r}")

    def as_tuple(self):
        return (self.commit, self.issue, self.pull, self.activity)

    def to_list(self):
        return list(self.as_tuple())

    @classmethod
    def parse(cls, text: str) -> "Weights":
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 4:
            raise InvalidWeights(f"expected 4 comma-separated weights, got {len(parts)}")
        return cls(*parts)


def composite_index(phis, weights: Weights = Weights()) -> float:
    """Weighted sum of the four per-component scores (commit, issue, pull, activity)."""
    if not isinstance(weights, Weights):
        weights = Weights(*weights)
    phis = tuple(phis.values()) if isinstance(phis, dict) else tuple(phis)
    if len(phis) != 4:
        raise ValueError(f"expected 4 component scores, got {len(phis)}")
    if any(not (0.0 <= p <= 1.0) for p in phis):
        raise ValueError(f"component scores must lie in [0, 1], got {phis}")
    return math.fsum(w * p for w, p in zip(weights.as_tuple(), phis))


def renormalized_index(phis, weights: Weights, missing) -> float:
    """Composite index over present components only, weights rescaled to sum 1."""
    present = [(w, p) for k, w, p in zip(COMPONENTS, weights.as_tuple(), phis) if k not in missing]
    total = math.fsum(w for w, _ in present)
    if total == 0:
        return 0.0
    if not missing:
        return composite_index(phis, weights)
    return math.fsum(w * p for w, p in present) / total


@dataclass(frozen=True)
class CsiResult:
    phi_c: float
    phi_i: float
    phi_p: float
    phi_a: float
    csi: float
    missing_components: tuple = ()
    unstable_components: tuple = ()
    renormalized_csi: Optional[float] = None
    measures: dict = field(default_factory=dict)

    @property
    def phis(self):
        return (self.phi_c, self.phi_i, self.phi_p, self.phi_a)

    @property
    def score(self) -> float:
        """The index under the policy in force: renormalized when reported, raw otherwise."""
        return self.csi if self.renormalized_csi is None else self.renormalized_csi

    def to_dict(self):
        return {
            "phi_c": self.phi_c, "phi_i": self.phi_i, "phi_p": self.phi_p, "phi_a": self.phi_a,
            "csi": self.csi,
            "renormalized_csi": self.renormalized_csi,
            "missing_components": list(self.missing_components),
            "unstable_components": list(self.unstable_components),
            "measures": dict(self.measures),
        }


def component_measures(metrics: MetricVector, regime: Regime = REVISED) -> dict:
    """The value each component is normalized on; ``None`` when missing."""
    return {
        "commit": metrics.cv(regime.commit_granularity),
        "issue": metrics.i_ratio,
        "pull": metrics.p_ratio,
        "activity": metrics.a,
    }


def evaluate(
    metrics: MetricVector,
    verdicts,
    params: NormalizerParams = NormalizerParams(),
    weights: Weights = Weights(),
    missing_policy: str = "zero",
    regime: Regime = REVISED,
) -> CsiResult:
    """Score one repository.

    Scores are computed whether or not a component passed its thresholds;
    failing components are listed in ``unstable_components`` for callers
    that want to gate on stability first.
    """
    if missing_policy not in MISSING_POLICIES:
        raise ValueError(f"missing_policy must be one of {MISSING_POLICIES}")
    by_component = {v.component: v for v in verdicts}
    measures = component_measures(metrics, regime)
    missing, phis = [], []
    for component in COMPONENTS:
        verdict = by_component.get(component)
        x = measures[component]
        if x is None or (verdict is not None and verdict.missing):
            missing.append(component)
            phis.append(0.0)
        else:
            phis.append(params.band(component).score(x))
    unstable = tuple(
        k for k in COMPONENTS
        if k in by_component and not by_component[k].stable and k not in missing
    )
    csi = composite_index(phis, weights)
    renormalized = None
    if missing_policy == "renormalize" and missing:
        renormalized = renormalized_index(phis, weights, missing)
    return CsiResult(*phis, csi=csi, missing_components=tuple(missing),
                     unstable_components=unstable, renormalized_csi=renormalized, measures=measures)
