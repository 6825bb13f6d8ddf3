"""Component measures over an analysis window.

All interval tests are half-open: an event belongs to the window when
``start <= t < end``. Durations are in days.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from datetime import datetime, timedelta
from typing import NamedTuple, Optional, Sequence

import numpy as np

from ._time import DAY, SECONDS_PER_DAY, WEEK
from .exceptions import EmptyInput, EmptyWindow, NoIssues, NoOpenItems, NoPulls, ZeroMean
from .ingestion.records import EventSet
from .window import AnalysisWindow

GRANULARITIES = {"daily": DAY, "weekly": WEEK}
DENOMINATORS = ("cumulative", "windowed")
TENDENCIES = ("mean", "median")
MAD_SCALE = 1.4826

_US = timedelta(microseconds=1)


def _check_choice(value, choices, what):
    if value not in choices:
        raise ValueError(f"{what} must be one of {tuple(choices)}, got {value!r}")
    return value


@dataclass(frozen=True)
class BinnedSeries:
    granularity: str
    start: datetime
    counts: tuple

    @property
    def width(self) -> timedelta:
        return GRANULARITIES[self.granularity]

    @property
    def bin_starts(self) -> list:
        return [self.start + k * self.width for k in range(len(self.counts))]

    @property
    def bins(self) -> list:
        return list(zip(self.bin_starts, self.counts))

    @property
    def total(self) -> int:
        return int(sum(self.counts))

    def __len__(self):
        return len(self.counts)


def bin_events(timestamps, window: AnalysisWindow, granularity: str = "daily") -> BinnedSeries:
    """Count events per fixed-width bin anchored at the window start.

    A trailing bin that would extend past the window end is dropped, so the
    bins cover ``[start, start + n * width)`` with ``n = floor(T / width)``.
    """
    width = GRANULARITIES[_check_choice(granularity, GRANULARITIES, "granularity")]
    n_bins = window.duration // width
    width_us = width // _US
    offsets = np.fromiter(((ts - window.start) // _US for ts in timestamps), dtype=np.int64)
    offsets = offsets[offsets >= 0]
    index = offsets // width_us
    index = index[index < n_bins]
    counts = np.bincount(index, minlength=n_bins) if n_bins else np.zeros(0, dtype=np.int64)
    return BinnedSeries(granularity, window.start, tuple(int(c) for c in counts))


def _counts(series) -> np.ndarray:
    counts = series.counts if isinstance(series, BinnedSeries) else series
    return np.asarray(counts, dtype=float)


def commit_frequency(series) -> float:
    """Mean events per bin."""
    counts = _counts(series)
    if counts.size == 0:
        raise EmptyWindow("series has no bins")
    return float(counts.sum() / counts.size)


def coefficient_of_variation(series) -> float:
    """Population standard deviation over mean of the bin counts."""
    counts = _counts(series)
    if counts.size < 2:
        raise EmptyWindow(f"need at least 2 bins, got {counts.size}")
    mean = counts.mean()
    if mean == 0:
        raise ZeroMean("no events in any bin")
    return float(counts.std() / mean)


class RobustStats(NamedTuple):
    median: float
    mad: float
    scaled_mad: float


def robust_stats(values: Sequence[float]) -> RobustStats:
    x = np.asarray(list(values), dtype=float)
    if x.size == 0:
        raise EmptyInput("robust_stats needs at least one value")
    if not np.all(np.isfinite(x)):
        raise ValueError("robust_stats requires finite values")
    med = float(np.median(x))
    mad = float(np.median(np.abs(x - med)))
    return RobustStats(med, mad, MAD_SCALE * mad)


def _central(values, tendency):
    if not values:
        return 0.0
    if tendency == "mean":
        return float(np.mean(values))
    return robust_stats(values).median


class RateResult(NamedTuple):
    ratio: float
    time_days: float
    full: float
    numerator: int
    denominator: int


def _rate(items, done_attr, window, denom, tendency, empty_error):
    _check_choice(denom, DENOMINATORS, "denominator mode")
    _check_choice(tendency, TENDENCIES, "tendency")
    if denom == "cumulative":
        base = [x for x in items if x.created_at < window.end]
    else:
        base = [x for x in items if window.contains(x.created_at)]
    if not base:
        raise empty_error(f"no items in {denom} denominator")
    done = []
    for item in base:
        at = getattr(item, done_attr)
        if at is not None and window.contains(at):
            done.append((at - item.created_at).total_seconds() / SECONDS_PER_DAY)
    ratio = len(done) / len(base)
    time_days = _central(done, tendency)
    return RateResult(ratio, time_days, ratio / (1.0 + time_days), len(done), len(base))


def issue_resolution_rate(issues, window: AnalysisWindow, denom="windowed", tendency="median") -> RateResult:
    """Closed-in-window issues over the chosen denominator, plus closure time.

    ``cumulative`` divides by every issue created before the window end and
    counts any of them closed in the window; ``windowed`` restricts both
    sides to issues created in the window.
    """
    return _rate(issues, "closed_at", window, denom, tendency, NoIssues)


def pr_merge_rate(pulls, window: AnalysisWindow, denom="windowed", tendency="median") -> RateResult:
    """Same as :func:`issue_resolution_rate` with ``merged_at`` as completion."""
    return _rate(pulls, "merged_at", window, denom, tendency, NoPulls)


class ActivityResult(NamedTuple):
    a: float
    active_user_ratio: float
    comments: int
    open_items: int
    active_users: int
    total_users: int


def active_user_ratio(events: EventSet, window: AnalysisWindow) -> tuple:
    active = {c.author for c in events.comments if window.contains(c.timestamp)}
    active.update(c.author for c in events.commits if window.contains(c.timestamp))
    active.update(p.author for p in events.pulls if window.contains(p.created_at))
    total = events.all_authors()
    ratio = len(active) / len(total) if total else 0.0
    return ratio, len(active), len(total)


def activity_engagement(events: EventSet, window: AnalysisWindow) -> ActivityResult:
    """Comments per open item, scaled by the share of users active in the window.

    Open items are counted at the window end: created before it and not yet
    closed (issues) or merged (pull requests) by then.
    """
    end = window.end
    open_issues = sum(
        1 for i in events.issues
        if i.created_at < end and not (i.closed_at is not None and i.closed_at < end)
    )
    open_prs = sum(
        1 for p in events.pulls
        if p.created_at < end and not (p.merged_at is not None and p.merged_at < end)
    )
    n_open = open_issues + open_prs
    n_comments = sum(1 for c in events.comments if window.contains(c.timestamp))
    ratio, n_active, n_total = active_user_ratio(events, window)
    if n_open == 0:
        raise NoOpenItems("no open issues or pull requests at window end")
    return ActivityResult(n_comments / n_open * ratio, ratio, n_comments, n_open, n_active, n_total)


@dataclass(frozen=True)
class MetricVector:
    """Measured state of one repository over one window.

    A component that cannot be measured (issues disabled, no commits, ...)
    has ``None`` in its fields and is listed in :attr:`missing`.
    """

    c: Optional[float]
    cv_daily: Optional[float]
    cv_weekly: Optional[float]
    i_ratio: Optional[float]
    i_time: Optional[float]
    i_full: Optional[float]
    p_ratio: Optional[float]
    p_time: Optional[float]
    p_full: Optional[float]
    a: Optional[float]
    active_user_ratio: float
    mean_resolution_days: Optional[float]
    median_resolution_days: Optional[float]
    mean_review_days: Optional[float]
    median_review_days: Optional[float]
    tendency: str = "median"
    denom: str = "windowed"

    def cv(self, granularity: str) -> Optional[float]:
        return self.cv_daily if granularity == "daily" else self.cv_weekly

    def missing(self, granularity: str = "weekly") -> tuple:
        out = []
        if self.cv(granularity) is None:
            out.append("commit")
        if self.i_ratio is None:
            out.append("issue")
        if self.p_ratio is None:
            out.append("pull")
        if self.a is None:
            out.append("activity")
        return tuple(out)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc) -> "MetricVector":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in doc.items() if k in names})


FEATURES = ("c", "cv_daily", "cv_weekly", "i_ratio", "i_time", "p_ratio", "p_time", "a", "active_user_ratio")


def _safe(fn, *args, errors=(EmptyWindow, ZeroMean)):
    try:
        return fn(*args)
    except errors:
        return None


def compute_metrics(events: EventSet, window: AnalysisWindow, tendency="median", denom="windowed") -> MetricVector:
    stamps = [c.timestamp for c in events.commits]
    daily = bin_events(stamps, window, "daily")
    weekly = bin_events(stamps, window, "weekly")

    def rate(fn, items, error):
        try:
            chosen = fn(items, window, denom, tendency)
        except error:
            return None, None
        other = fn(items, window, denom, "mean" if tendency == "median" else "median")
        mean, median = (chosen, other) if tendency == "mean" else (other, chosen)
        return chosen, (mean.time_days, median.time_days)

    issue, issue_times = rate(issue_resolution_rate, events.issues, NoIssues)
    pull, pull_times = rate(pr_merge_rate, events.pulls, NoPulls)
    try:
        activity = activity_engagement(events, window)
        a, user_ratio = activity.a, activity.active_user_ratio
    except NoOpenItems:
        a, user_ratio = None, active_user_ratio(events, window)[0]

    return MetricVector(
        c=_safe(commit_frequency, daily),
        cv_daily=_safe(coefficient_of_variation, daily),
        cv_weekly=_safe(coefficient_of_variation, weekly),
        i_ratio=issue.ratio if issue else None,
        i_time=issue.time_days if issue else None,
        i_full=issue.full if issue else None,
        p_ratio=pull.ratio if pull else None,
        p_time=pull.time_days if pull else None,
        p_full=pull.full if pull else None,
        a=a,
        active_user_ratio=user_ratio,
        mean_resolution_days=issue_times[0] if issue else None,
        median_resolution_days=issue_times[1] if issue else None,
        mean_review_days=pull_times[0] if pull else None,
        median_review_days=pull_times[1] if pull else None,
        tendency=tendency,
        denom=denom,
    )
