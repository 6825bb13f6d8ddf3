"""Deterministic synthetic repositories with controllable stability.

Randomness comes from numpy's Philox bit generator, a counter-based PRNG
whose stream depends only on the seed, so a spec reproduces the same
EventSet on every platform. All timestamps sit on whole seconds.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from datetime import datetime, timedelta

import numpy as np

from ._time import UTC, to_utc
from .exceptions import InvalidSpec
from .ingestion.records import (
    CommentRecord,
    CommitRecord,
    EventSet,
    IssueRecord,
    PullRequestRecord,
    RepoMetadata,
    RepoRef,
)
from .window import AnalysisWindow

DAY_SECONDS = 86400


@dataclass(frozen=True)
class CommitProcess:
    kind: str = "poisson"  # constant | poisson | bursty
    rate: float = 1.0
    burst_rate: float = 0.0
    burst_prob: float = 0.0

    @classmethod
    def constant(cls, per_day: int = 1):
        return cls("constant", per_day)

    @classmethod
    def poisson(cls, rate: float):
        return cls("poisson", rate)

    @classmethod
    def bursty(cls, base_rate: float, burst_rate: float, burst_prob: float):
        return cls("bursty", base_rate, burst_rate, burst_prob)


@dataclass(frozen=True)
class DurationDist:
    """Time-to-completion distribution, parametrised by its median in days."""

    kind: str = "exponential"  # fixed | exponential | lognormal
    median_days: float = 5.0
    spread: float = 1.0

    def sample(self, rng, n):
        if self.kind == "fixed":
            return np.full(n, self.median_days)
        if self.kind == "exponential":
            return rng.exponential(self.median_days / np.log(2.0), n)
        if self.kind == "lognormal":
            return rng.lognormal(np.log(max(self.median_days, 1e-9)), self.spread, n)
        raise InvalidSpec(f"unknown duration kind {self.kind!r}")


@dataclass(frozen=True)
class ItemSpec:
    open_rate: float = 0.5  # items per day
    completion_ratio: float = 0.5  # closed (issues) or merged (pulls)
    durations: DurationDist = DurationDist()


@dataclass(frozen=True)
class ScenarioSpec:
    seed: int = 0
    duration_days: int = 365
    start: datetime = datetime(2020, 1, 1, tzinfo=UTC)
    commit_process: CommitProcess = CommitProcess()
    issues: ItemSpec = ItemSpec()
    pulls: ItemSpec = ItemSpec()
    comment_rate: float = 2.0  # mean comments per item
    user_pool: int = 20
    active_fraction: float = 0.5
    history_days: int = 0
    repo: str = "synthetic/repo"

    @property
    def window(self) -> AnalysisWindow:
        start = to_utc(self.start)
        return AnalysisWindow(start, start + timedelta(days=self.duration_days))

    def check(self):
        rates = {
            "commit rate": self.commit_process.rate,
            "burst rate": self.commit_process.burst_rate,
            "issue open_rate": self.issues.open_rate,
            "pull open_rate": self.pulls.open_rate,
            "comment_rate": self.comment_rate,
            "issue median_days": self.issues.durations.median_days,
            "pull median_days": self.pulls.durations.median_days,
        }
        for name, value in rates.items():
            if not value >= 0:
                raise InvalidSpec(f"{name} must be >= 0, got {value!r}")
        fractions = {
            "burst_prob": self.commit_process.burst_prob,
            "issue completion_ratio": self.issues.completion_ratio,
            "pull completion_ratio": self.pulls.completion_ratio,
            "active_fraction": self.active_fraction,
        }
        for name, value in fractions.items():
            if not 0.0 <= value <= 1.0:
                raise InvalidSpec(f"{name} must lie in [0, 1], got {value!r}")
        if self.commit_process.kind not in ("constant", "poisson", "bursty"):
            raise InvalidSpec(f"unknown commit process {self.commit_process.kind!r}")
        if self.commit_process.kind == "constant" and float(self.commit_process.rate) != int(self.commit_process.rate):
            raise InvalidSpec("constant commit process needs an integer per-day rate")
        if self.duration_days < 1 or self.history_days < 0:
            raise InvalidSpec("duration_days must be >= 1 and history_days >= 0")
        if self.user_pool < 1:
            raise InvalidSpec("user_pool must be >= 1")
        for dist in (self.issues.durations, self.pulls.durations):
            if dist.kind not in ("fixed", "exponential", "lognormal"):
                raise InvalidSpec(f"unknown duration kind {dist.kind!r}")
        return self


def _daily_commit_counts(process: CommitProcess, rng, days: int) -> np.ndarray:
    if process.kind == "constant":
        return np.full(days, int(process.rate))
    if process.kind == "poisson":
        return rng.poisson(process.rate, days)
    burst = rng.random(days) < process.burst_prob
    return np.where(burst, rng.poisson(process.burst_rate, days), rng.poisson(process.rate, days))


def _commit_seconds(process, rng, days: int, first_day: int) -> list:
    counts = _daily_commit_counts(process, rng, days)
    out = []
    for day, k in enumerate(counts):
        base = (first_day + day) * DAY_SECONDS
        if k == 0:
            continue
        if process.kind == "constant":
            step = DAY_SECONDS // k
            offsets = np.arange(k) * step + step // 2
        else:
            offsets = np.sort(rng.integers(0, DAY_SECONDS, k))
        out.extend(int(base + o) for o in offsets)
    return out


def _items(spec: ItemSpec, rng, first_day: int, days: int):
    """Creation offsets (seconds) and completion offsets (or None)."""
    n = int(rng.poisson(spec.open_rate * days)) if days else 0
    created = np.sort(rng.integers(first_day * DAY_SECONDS, (first_day + days) * DAY_SECONDS, n))
    n_done = int(round(spec.completion_ratio * n))
    done_mask = np.zeros(n, dtype=bool)
    done_mask[rng.permutation(n)[:n_done]] = True
    durations = np.round(spec.durations.sample(rng, n) * DAY_SECONDS).astype(np.int64)
    durations = np.maximum(durations, 0)
    return [
        (int(c), int(c + d) if m else None)
        for c, d, m in zip(created, durations, done_mask)
    ]


def generate(spec: ScenarioSpec) -> EventSet:
    spec.check()
    rng = np.random.Generator(np.random.Philox(spec.seed))
    window = spec.window
    origin = window.start
    end_s = spec.duration_days * DAY_SECONDS
    first = -spec.history_days

    def at(seconds):
        return origin + timedelta(seconds=int(seconds))

    users = [f"user{k:04d}" for k in range(spec.user_pool)]
    n_active = min(spec.user_pool, max(1, int(round(spec.active_fraction * spec.user_pool))))
    active, inactive = users[:n_active], users[n_active:]

    def pick(n):
        return [active[k] for k in rng.integers(0, len(active), n)]

    # commits
    stamps = _commit_seconds(spec.commit_process, rng, spec.duration_days + spec.history_days, first)
    authors = pick(len(stamps))
    commits = [
        CommitRecord(hashlib.sha1(f"{spec.seed}:{n}".encode()).hexdigest(), a, at(s))
        for n, (s, a) in enumerate(zip(stamps, authors))
    ]
    # inactive users appear once, strictly before the window
    for n, user in enumerate(inactive):
        sha = hashlib.sha1(f"{spec.seed}:legacy:{n}".encode()).hexdigest()
        commits.append(CommitRecord(sha, user, at(first * DAY_SECONDS - DAY_SECONDS + n)))
    commits.sort(key=lambda c: (c.timestamp, c.id))

    issue_rows = _items(spec.issues, rng, first, spec.duration_days + spec.history_days)
    pull_rows = _items(spec.pulls, rng, first, spec.duration_days + spec.history_days)
    tagged = sorted(
        [(c, d, "issue") for c, d in issue_rows] + [(c, d, "pull") for c, d in pull_rows],
        key=lambda row: (row[0], row[2]),
    )
    item_authors = pick(len(tagged))
    issues, pulls, comment_rows = [], [], []
    for number, ((created, done, kind), author) in enumerate(zip(tagged, item_authors), start=1):
        if kind == "issue":
            issues.append(IssueRecord(number, at(created), author, at(done) if done is not None else None))
        else:
            pulls.append(PullRequestRecord(
                number, at(created), author,
                merged_at=at(done) if done is not None else None,
                closed_at=at(done) if done is not None else None,
            ))
        if created < 0:
            continue
        k = int(rng.poisson(spec.comment_rate))
        stop = min(done if done is not None else end_s, end_s)
        if stop > created:
            offsets = rng.integers(created, stop, k)
        else:
            offsets = np.full(k, created)
        parent = "issue" if kind == "issue" else "pull_request"
        comment_rows.extend((int(o), parent) for o in offsets)
    comment_rows.sort()
    comment_authors = pick(len(comment_rows))
    comments = [
        CommentRecord(n, a, at(s), parent)
        for n, ((s, parent), a) in enumerate(zip(comment_rows, comment_authors), start=1)
    ]

    created_at = origin - timedelta(days=max(spec.history_days, 1) + len(inactive) + 1)
    return EventSet(
        repo=RepoRef.parse(spec.repo),
        metadata=RepoMetadata(created_at=created_at),
        commits=commits,
        issues=issues,
        pulls=pulls,
        comments=comments,
    )


def random_spec(seed: int, duration_days: tuple = (90, 400), history_days: int = 0) -> ScenarioSpec:
    """A varied but valid scenario drawn from ``seed``; handy for sweeps."""
    rng = np.random.Generator(np.random.Philox(seed))
    kind = ("constant", "poisson", "bursty")[int(rng.integers(0, 3))]
    if kind == "constant":
        process = CommitProcess.constant(int(rng.integers(1, 4)))
    elif kind == "poisson":
        process = CommitProcess.poisson(float(rng.uniform(0.2, 6.0)))
    else:
        process = CommitProcess.bursty(float(rng.uniform(0.0, 1.0)), float(rng.uniform(5, 40)), float(rng.uniform(0.01, 0.2)))

    def item():
        dist = DurationDist(
            ("fixed", "exponential", "lognormal")[int(rng.integers(0, 3))],
            float(rng.uniform(0.0, 20.0)),
            float(rng.uniform(0.3, 2.0)),
        )
        return ItemSpec(float(rng.uniform(0.0, 2.0)), float(rng.uniform(0.0, 1.0)), dist)

    return ScenarioSpec(
        seed=seed,
        duration_days=int(rng.integers(duration_days[0], duration_days[1] + 1)),
        commit_process=process,
        issues=item(),
        pulls=item(),
        comment_rate=float(rng.uniform(0.0, 5.0)),
        user_pool=int(rng.integers(1, 60)),
        active_fraction=float(rng.uniform(0.0, 1.0)),
        history_days=history_days,
        repo=f"synthetic/s{seed}",
    )
