"""Plain record types for repository events."""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from typing import Optional

from .._time import to_utc
from ..exceptions import InvalidEventSet

UserId = str

PARENT_KINDS = ("issue", "pull_request", "commit")


@dataclass(frozen=True)
class RepoRef:
    owner: str
    name: str

    def __post_init__(self):
        if not self.owner or not self.name or "/" in self.owner or "/" in self.name:
            raise ValueError(f"invalid repository reference {self.owner!r}/{self.name!r}")

    @classmethod
    def parse(cls, text: str) -> "RepoRef":
        owner, sep, name = text.strip().partition("/")
        if not sep:
            raise ValueError(f"expected 'owner/name', got {text!r}")
        return cls(owner, name)

    def __str__(self):
        return f"{self.owner}/{self.name}"


@dataclass(frozen=True)
class RepoMetadata:
    stars: int = 0
    forks: int = 0
    created_at: datetime = datetime(1970, 1, 1)
    is_archived: bool = False
    is_educational: bool = False
    has_issues_enabled: bool = True

    def __post_init__(self):
        object.__setattr__(self, "created_at", to_utc(self.created_at))
        if self.stars < 0 or self.forks < 0:
            raise ValueError("stars and forks must be non-negative")


@dataclass(frozen=True)
class CommitRecord:
    id: str
    author: UserId
    timestamp: datetime

    def __post_init__(self):
        object.__setattr__(self, "timestamp", to_utc(self.timestamp))


@dataclass(frozen=True)
class IssueRecord:
    id: int
    created_at: datetime
    author: UserId
    closed_at: Optional[datetime] = None

    def __post_init__(self):
        object.__setattr__(self, "created_at", to_utc(self.created_at))
        if self.closed_at is not None:
            object.__setattr__(self, "closed_at", to_utc(self.closed_at))


@dataclass(frozen=True)
class PullRequestRecord:
    id: int
    created_at: datetime
    author: UserId
    merged_at: Optional[datetime] = None
    closed_at: Optional[datetime] = None

    def __post_init__(self):
        object.__setattr__(self, "created_at", to_utc(self.created_at))
        for name in ("merged_at", "closed_at"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, to_utc(value))

    @property
    def merged(self) -> bool:
        return self.merged_at is not None


@dataclass(frozen=True)
class CommentRecord:
    id: int
    author: UserId
    timestamp: datetime
    parent_kind: str

    def __post_init__(self):
        object.__setattr__(self, "timestamp", to_utc(self.timestamp))


@dataclass(frozen=True)
class EventSet:
    """Every ingested event for one repository.

    Collections are stored as tuples; an EventSet is never mutated after
    construction, so it can be shared freely between threads.
    """

    repo: RepoRef
    metadata: RepoMetadata = field(default_factory=RepoMetadata)
    commits: tuple = ()
    issues: tuple = ()
    pulls: tuple = ()
    comments: tuple = ()

    def __post_init__(self):
        for name in ("commits", "issues", "pulls", "comments"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    def validate(self) -> "EventSet":
        problems = event_set_problems(self)
        if problems:
            raise InvalidEventSet("; ".join(problems))
        return self

    def all_authors(self) -> set:
        users = {c.author for c in self.commits}
        users.update(i.author for i in self.issues)
        users.update(p.author for p in self.pulls)
        users.update(c.author for c in self.comments)
        return users


def event_set_problems(events: EventSet) -> list:
    """List every invariant violation in ``events`` (empty when valid)."""
    problems = []
    for name in ("commits", "issues", "pulls", "comments"):
        seen = set()
        for record in getattr(events, name):
            if record.id in seen:
                problems.append(f"duplicate {name} id {record.id!r}")
            seen.add(record.id)
    for issue in events.issues:
        if issue.closed_at is not None and issue.closed_at < issue.created_at:
            problems.append(f"issue {issue.id} closed before it was created")
    for pr in events.pulls:
        if pr.merged_at is not None and pr.merged_at < pr.created_at:
            problems.append(f"pull {pr.id} merged before it was created")
    overlap = {i.id for i in events.issues} & {p.id for p in events.pulls}
    if overlap:
        problems.append(f"ids present as both issue and pull: {sorted(overlap)[:5]}")
    for comment in events.comments:
        if comment.parent_kind not in PARENT_KINDS:
            problems.append(f"comment {comment.id} has unknown parent_kind {comment.parent_kind!r}")
    return problems
