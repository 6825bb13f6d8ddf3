from datetime import datetime, timedelta, timezone

from repo_stability.ingestion import (
    CommentRecord,
    CommitRecord,
    EventSet,
    IssueRecord,
    PullRequestRecord,
    RepoRef,
)

UTC = timezone.utc
T0 = datetime(2020, 1, 1, tzinfo=UTC)


def utc(*args):
    return datetime(*args, tzinfo=UTC)


def day(n, hours=0.0):
    return T0 + timedelta(days=n, hours=hours)


def make_events(commits=(), issues=(), pulls=(), comments=(), repo="acme/widget"):
    return EventSet(RepoRef.parse(repo), commits=commits, issues=issues, pulls=pulls, comments=comments)


def commit(n, when, author="dev"):
    return CommitRecord(f"c{n}", author, when)


def issue(n, created, closed=None, author="reporter"):
    return IssueRecord(n, created, author, closed)


def pull(n, created, merged=None, author="contrib"):
    return PullRequestRecord(n, created, author, merged_at=merged, closed_at=merged)


def comment(n, when, author="talker", kind="issue"):
    return CommentRecord(n, author, when, kind)
