"""Data-driven normalizer bands from a cohort of stable repositories.

The band centre is the cohort median and the half-width is the
normal-consistent MAD (``1.4826 * MAD``).
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

from .csi import Band, NormalizerParams
from .exceptions import EmptyCohort
from .metrics import robust_stats

CALIBRATED_COMPONENTS = ("issue", "pull", "activity")
DEFAULT_SIGMA_FLOOR = 0.01


@dataclass(frozen=True)
class CalibrationResult:
    component: str
    cohort_size: int
    mu: float
    sigma: float
    mad: float
    min_value: float
    max_value: float

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, doc):
        return cls(**doc)


def calibrate(component: str, measures) -> CalibrationResult:
    """Fit a band to the measures whose verdict is stable.

    ``measures`` is an iterable of ``(repo, measure, verdict)``; unstable or
    missing entries are ignored.
    """
    cohort = [
        float(measure) for _repo, measure, verdict in measures
        if verdict is not None and verdict.stable and measure is not None
    ]
    if not cohort:
        raise EmptyCohort(f"no stable repositories for component {component!r}")
    stats = robust_stats(cohort)
    return CalibrationResult(
        component=component,
        cohort_size=len(cohort),
        mu=stats.median,
        sigma=stats.scaled_mad,
        mad=stats.mad,
        min_value=min(cohort),
        max_value=max(cohort),
    )


def apply_calibration(base: NormalizerParams, results, sigma_floor: float = DEFAULT_SIGMA_FLOOR) -> NormalizerParams:
    if not sigma_floor > 0:
        raise ValueError("sigma_floor must be positive")
    params = base
    for result in results:
        params = params.with_band(result.component, Band(result.mu, max(result.sigma, sigma_floor)))
    return params
