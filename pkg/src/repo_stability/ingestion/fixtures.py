"""Offline fixture format: one JSON document per repository.

Top-level keys are ``repo``, ``metadata``, ``commits``, ``issues``,
``pulls`` and ``comments``. Timestamps are ISO-8601 strings in UTC.
See ``docs/fixtures.md`` for the field-level schema.
"""
import json
from pathlib import Path

from .._time import format_utc, to_utc
from ..exceptions import MalformedFixture
from .records import (
    PARENT_KINDS,
    CommentRecord,
    CommitRecord,
    EventSet,
    IssueRecord,
    PullRequestRecord,
    RepoMetadata,
    RepoRef,
)

TOP_LEVEL_KEYS = ("repo", "metadata", "commits", "issues", "pulls", "comments")


def _ts(value):
    return None if value is None else format_utc(value)


def event_set_to_dict(events: EventSet) -> dict:
    meta = events.metadata
    return {
        "repo": str(events.repo),
        "metadata": {
            "stars": meta.stars,
            "forks": meta.forks,
            "created_at": _ts(meta.created_at),
            "is_archived": meta.is_archived,
            "is_educational": meta.is_educational,
            "has_issues_enabled": meta.has_issues_enabled,
        },
        "commits": [
            {"id": c.id, "author": c.author, "timestamp": _ts(c.timestamp)} for c in events.commits
        ],
        "issues": [
            {"id": i.id, "author": i.author, "created_at": _ts(i.created_at), "closed_at": _ts(i.closed_at)}
            for i in events.issues
        ],
        "pulls": [
            {
                "id": p.id,
                "author": p.author,
                "created_at": _ts(p.created_at),
                "merged_at": _ts(p.merged_at),
                "closed_at": _ts(p.closed_at),
            }
            for p in events.pulls
        ],
        "comments": [
            {"id": c.id, "author": c.author, "timestamp": _ts(c.timestamp), "parent_kind": c.parent_kind}
            for c in events.comments
        ],
    }


def dumps_fixture(events: EventSet) -> str:
    """Canonical serialization: sorted keys, two-space indent, trailing newline."""
    return json.dumps(event_set_to_dict(events), indent=2, sort_keys=True) + "\n"


def save_fixture(events: EventSet, path) -> Path:
    path = Path(path)
    path.write_text(dumps_fixture(events), encoding="utf-8")
    return path


def _opt_ts(record, key):
    value = record.get(key)
    return None if value is None else to_utc(value)


def _build(kind, index, record, factory):
    where = f"{kind}[{index}]"
    if not isinstance(record, dict):
        raise MalformedFixture(f"{where}: expected an object, got {type(record).__name__}")
    try:
        return factory(record)
    except MalformedFixture as exc:
        raise MalformedFixture(f"{where}: {exc}") from None
    except KeyError as exc:
        raise MalformedFixture(f"{where}: missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise MalformedFixture(f"{where}: {exc}") from None


def _commit(r):
    return CommitRecord(id=str(r["id"]), author=str(r["author"]), timestamp=to_utc(r["timestamp"]))


def _issue(r):
    issue = IssueRecord(
        id=int(r["id"]), author=str(r["author"]),
        created_at=to_utc(r["created_at"]), closed_at=_opt_ts(r, "closed_at"),
    )
    if issue.closed_at is not None and issue.closed_at < issue.created_at:
        raise MalformedFixture(f"issue {issue.id} closed_at precedes created_at")
    return issue


def _pull(r):
    pr = PullRequestRecord(
        id=int(r["id"]), author=str(r["author"]), created_at=to_utc(r["created_at"]),
        merged_at=_opt_ts(r, "merged_at"), closed_at=_opt_ts(r, "closed_at"),
    )
    if pr.merged_at is not None and pr.merged_at < pr.created_at:
        raise MalformedFixture(f"pull {pr.id} merged_at precedes created_at")
    return pr


def _comment(r):
    kind = r["parent_kind"]
    if kind not in PARENT_KINDS:
        raise MalformedFixture(f"comment {r.get('id')!r}: parent_kind must be one of {PARENT_KINDS}")
    return CommentRecord(id=int(r["id"]), author=str(r["author"]), timestamp=to_utc(r["timestamp"]), parent_kind=kind)


def _metadata(r):
    return RepoMetadata(
        stars=int(r.get("stars", 0)),
        forks=int(r.get("forks", 0)),
        created_at=to_utc(r["created_at"]) if r.get("created_at") else RepoMetadata().created_at,
        is_archived=bool(r.get("is_archived", False)),
        is_educational=bool(r.get("is_educational", False)),
        has_issues_enabled=bool(r.get("has_issues_enabled", True)),
    )


def event_set_from_dict(doc) -> EventSet:
    if not isinstance(doc, dict):
        raise MalformedFixture("fixture root must be a JSON object")
    missing = [k for k in TOP_LEVEL_KEYS if k not in doc]
    if missing:
        raise MalformedFixture(f"fixture is missing top-level keys {missing}")
    try:
        repo = RepoRef.parse(doc["repo"])
    except (AttributeError, ValueError) as exc:
        raise MalformedFixture(f"repo: {exc}") from None
    metadata = _build("metadata", 0, doc["metadata"], _metadata)

    collections = {}
    for kind, factory in (("commits", _commit), ("issues", _issue), ("pulls", _pull), ("comments", _comment)):
        records = doc[kind]
        if not isinstance(records, list):
            raise MalformedFixture(f"{kind}: expected a list")
        built, seen = [], set()
        for index, raw in enumerate(records):
            record = _build(kind, index, raw, factory)
            if record.id in seen:
                raise MalformedFixture(f"{kind}[{index}]: duplicate id {record.id!r}")
            seen.add(record.id)
            built.append(record)
        collections[kind] = built

    overlap = {i.id for i in collections["issues"]} & {p.id for p in collections["pulls"]}
    if overlap:
        first = min(overlap)
        index = next(n for n, p in enumerate(collections["pulls"]) if p.id == first)
        raise MalformedFixture(f"pulls[{index}]: id {first} also appears as an issue")
    return EventSet(repo=repo, metadata=metadata, **collections)


def load_fixture(path) -> EventSet:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedFixture(f"{path}: invalid JSON ({exc})") from None
    return event_set_from_dict(doc)
