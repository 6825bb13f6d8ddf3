"""REST ingestion with a per-endpoint disk cache and exponential back-off.

The wire layer is a ``transport`` callable ``(url, params, headers) ->
Response`` so tests can substitute a mock without touching the network.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Callable, Mapping, Optional

from .._time import UTC, format_utc, to_utc
from ..exceptions import AuthRequired, RepoNotFound, SourceUnavailable
from .records import (
    CommentRecord,
    CommitRecord,
    EventSet,
    IssueRecord,
    PullRequestRecord,
    RepoMetadata,
    RepoRef,
)

log = logging.getLogger(__name__)

DEFAULT_BASE_URL = "https://api.github.com"
DEFAULT_TOKEN_ENV = "GITHUB_TOKEN"
PER_PAGE = 100
SEARCH_RESULT_CAP = 1000
TRANSIENT_4XX = {408, 425, 429}


@dataclass(frozen=True)
class Response:
    status: int
    body: bytes
    headers: Mapping[str, str] = field(default_factory=dict)


Transport = Callable[[str, Mapping, Mapping], Response]


def requests_transport(timeout: float = 30.0) -> Transport:
    import requests

    session = requests.Session()

    def send(url, params, headers):
        r = session.get(url, params=params, headers=headers, timeout=timeout)
        return Response(r.status_code, r.content, dict(r.headers))

    return send


def default_cache_dir() -> Path:
    root = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(root) / "repo-stability"


@dataclass(frozen=True)
class CachePolicy:
    cache_dir: Path = field(default_factory=default_cache_dir)
    ttl: timedelta = timedelta(hours=24)

    def __post_init__(self):
        object.__setattr__(self, "cache_dir", Path(self.cache_dir))
        if self.ttl <= timedelta(0):
            raise ValueError("cache ttl must be positive")


@dataclass(frozen=True)
class RetryPolicy:
    max_retries: int = 5
    base_delay: float = 1.0
    backoff: float = 2.0

    def __post_init__(self):
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.base_delay <= 0 or self.backoff <= 1:
            raise ValueError("base_delay must be > 0 and backoff > 1")

    def delays(self):
        return [self.base_delay * self.backoff ** k for k in range(self.max_retries)]


class ResponseCache:
    """JSON-endpoint cache on disk, one body file per (endpoint, params) key."""

    def __init__(self, policy: CachePolicy, clock: Optional[Callable[[], datetime]] = None):
        self.policy = policy
        self.clock = clock or (lambda: datetime.now(UTC))
        self._locks: dict = {}
        self._locks_guard = threading.Lock()

    @staticmethod
    def key(endpoint: str, params: Mapping, scope=None) -> str:
        payload = json.dumps(
            {"endpoint": endpoint, "params": {k: str(v) for k, v in params.items()}, "scope": scope},
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()

    def _lock(self, key):
        with self._locks_guard:
            return self._locks.setdefault(key, threading.Lock())

    def _paths(self, key):
        return self.policy.cache_dir / f"{key}.body", self.policy.cache_dir / f"{key}.meta.json"

    def get(self, key) -> Optional[bytes]:
        body_path, meta_path = self._paths(key)
        with self._lock(key):
            try:
                meta = json.loads(meta_path.read_text())
                body = body_path.read_bytes()
            except (OSError, ValueError):
                return None
        fetched = to_utc(meta["fetched_at"])
        if self.clock() - fetched >= self.policy.ttl:
            return None
        if hashlib.sha256(body).hexdigest() != meta.get("sha256"):
            return None
        return body

    def put(self, key, body: bytes, endpoint: str = "", params: Mapping = ()):
        directory = self.policy.cache_dir
        directory.mkdir(parents=True, exist_ok=True)
        body_path, meta_path = self._paths(key)
        meta = {
            "endpoint": endpoint,
            "params": {k: str(v) for k, v in dict(params).items()},
            "fetched_at": format_utc(self.clock()),
            "sha256": hashlib.sha256(body).hexdigest(),
        }
        with self._lock(key):
            _atomic_write(body_path, body)
            _atomic_write(meta_path, json.dumps(meta, sort_keys=True).encode())


def _atomic_write(path: Path, data: bytes):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _is_transient(resp: Response) -> bool:
    if resp.status >= 500 or resp.status in TRANSIENT_4XX:
        return True
    # GitHub signals primary rate limiting with 403 + exhausted quota.
    remaining = {k.lower(): v for k, v in resp.headers.items()}.get("x-ratelimit-remaining")
    return resp.status == 403 and remaining == "0"


class RestSource:
    """Cached, retrying client for GitHub-compatible REST endpoints."""

    def __init__(
        self,
        base_url: str = DEFAULT_BASE_URL,
        token: Optional[str] = None,
        transport: Optional[Transport] = None,
        cache: Optional[CachePolicy] = None,
        retry: RetryPolicy = RetryPolicy(),
        sleep: Callable[[float], None] = time.sleep,
        clock: Optional[Callable[[], datetime]] = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.token = token
        self.transport = transport or requests_transport()
        self.cache = ResponseCache(cache, clock) if cache is not None else None
        self.retry = retry
        self.sleep = sleep
        self.request_count = 0

    @classmethod
    def from_env(cls, token_env: str = DEFAULT_TOKEN_ENV, **kwargs) -> "RestSource":
        return cls(token=os.environ.get(token_env) or None, **kwargs)

    def _headers(self):
        headers = {"Accept": "application/vnd.github+json"}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        return headers

    def _request(self, path: str, params: Mapping) -> Response:
        url = f"{self.base_url}{path}"
        delays = self.retry.delays()
        attempt = 0
        while True:
            self.request_count += 1
            try:
                resp = self.transport(url, dict(params), self._headers())
            except OSError as exc:  # requests' ConnectionError subclasses OSError
                resp, error = None, exc
            else:
                error = None
                if resp.status < 400 or resp.status in (404, 409):
                    return resp
                if resp.status == 401 or (resp.status == 403 and not _is_transient(resp)):
                    raise AuthRequired(f"{path}: credentials rejected (HTTP {resp.status})")
                if not _is_transient(resp):
                    raise SourceUnavailable(f"{path}: HTTP {resp.status}")
            if attempt >= len(delays):
                detail = f"HTTP {resp.status}" if resp is not None else repr(error)
                raise SourceUnavailable(f"{path}: gave up after {attempt} retries ({detail})")
            log.info("transient failure on %s, retrying in %.2fs", path, delays[attempt])
            self.sleep(delays[attempt])
            attempt += 1

    def get_body(self, path: str, params: Optional[Mapping] = None, scope=None) -> tuple:
        """Return ``(status, body)`` for one endpoint call, using the cache."""
        params = dict(params or {})
        key = ResponseCache.key(path, params, scope) if self.cache else None
        if self.cache is not None:
            body = self.cache.get(key)
            if body is not None:
                return 200, body
        resp = self._request(path, params)
        if resp.status == 200 and self.cache is not None:
            self.cache.put(key, resp.body, path, params)
        return resp.status, resp.body

    def get_json(self, path, params=None, scope=None):
        status, body = self.get_body(path, params, scope)
        if status == 404:
            raise RepoNotFound(path)
        if status == 409:
            return None
        return json.loads(body)

    def paginate(self, path, params=None, items_key=None, scope=None, cap=None):
        params = dict(params or {})
        page = 1
        items = []
        while True:
            doc = self.get_json(path, {**params, "per_page": PER_PAGE, "page": page}, scope)
            if doc is None:  # 409: empty git repository
                return items
            batch = doc.get(items_key, []) if items_key else doc
            items.extend(batch)
            if len(batch) < PER_PAGE or (cap is not None and len(items) >= cap):
                return items
            page += 1


def _login(user) -> str:
    if isinstance(user, dict) and user.get("login"):
        return user["login"]
    return "ghost"


def _commit_from_api(raw) -> CommitRecord:
    detail = raw.get("commit", {})
    stamp = (detail.get("committer") or {}).get("date") or (detail.get("author") or {}).get("date")
    author = raw.get("author")
    name = _login(author) if author else (detail.get("author") or {}).get("email") or "ghost"
    return CommitRecord(id=raw["sha"], author=name, timestamp=to_utc(stamp))


def _number_from_url(url) -> Optional[int]:
    try:
        return int(str(url).rstrip("/").rsplit("/", 1)[-1])
    except ValueError:
        return None


def fetch_events(
    repo: RepoRef,
    window,
    source: RestSource,
    *,
    is_educational: bool = False,
    exclude_authors=(),
) -> EventSet:
    """Pull every event needed to score ``repo`` over ``window``.

    Commits and comments are requested from the window start onward; issues
    and pull requests are requested for their whole history up to the window
    end, because cumulative denominators need pre-window items.
    """
    base = f"/repos/{repo.owner}/{repo.name}"
    scope = [format_utc(window.start), format_utc(window.end)]
    since, until = format_utc(window.start), format_utc(window.end)
    end_date = window.end.strftime("%Y-%m-%dT%H:%M:%SZ")

    info = source.get_json(base, scope=scope)
    metadata = RepoMetadata(
        stars=int(info.get("stargazers_count", 0)),
        forks=int(info.get("forks_count", 0)),
        created_at=to_utc(info["created_at"]) if info.get("created_at") else RepoMetadata().created_at,
        is_archived=bool(info.get("archived", False)),
        is_educational=is_educational,
        has_issues_enabled=bool(info.get("has_issues", True)),
    )

    commits = {}
    for raw in source.paginate(f"{base}/commits", {"since": since, "until": until}, scope=scope):
        record = _commit_from_api(raw)
        commits.setdefault(record.id, record)

    def search(kind):
        q = f"repo:{repo} type:{kind} created:<={end_date}"
        return source.paginate(
            "/search/issues", {"q": q, "sort": "created", "order": "asc"},
            items_key="items", scope=scope, cap=SEARCH_RESULT_CAP,
        )

    issues = {}
    if metadata.has_issues_enabled:
        for raw in search("issue"):
            if "pull_request" in raw:
                continue
            issues.setdefault(raw["number"], IssueRecord(
                id=raw["number"], author=_login(raw.get("user")),
                created_at=raw["created_at"], closed_at=raw.get("closed_at"),
            ))

    pulls = {}
    for raw in search("pr"):
        merged = (raw.get("pull_request") or {}).get("merged_at")
        pulls.setdefault(raw["number"], PullRequestRecord(
            id=raw["number"], author=_login(raw.get("user")),
            created_at=raw["created_at"], merged_at=merged, closed_at=raw.get("closed_at"),
        ))

    comments = {}
    for raw in source.paginate(f"{base}/issues/comments", {"since": since}, scope=scope):
        number = _number_from_url(raw.get("issue_url"))
        is_pr = number in pulls or "/pull/" in str(raw.get("html_url", ""))
        comments.setdefault(raw["id"], CommentRecord(
            id=raw["id"], author=_login(raw.get("user")), timestamp=raw["created_at"],
            parent_kind="pull_request" if is_pr else "issue",
        ))
    for raw in source.paginate(f"{base}/pulls/comments", {"since": since}, scope=scope):
        comments.setdefault(raw["id"], CommentRecord(
            id=raw["id"], author=_login(raw.get("user")), timestamp=raw["created_at"],
            parent_kind="pull_request",
        ))

    excluded = set(exclude_authors)

    def keep(records):
        return [r for r in records if r.author not in excluded]

    return EventSet(
        repo=repo,
        metadata=metadata,
        commits=keep(sorted(commits.values(), key=lambda c: (c.timestamp, c.id))),
        issues=keep(sorted(issues.values(), key=lambda i: i.id)),
        pulls=keep(sorted(pulls.values(), key=lambda p: p.id)),
        comments=keep(sorted(comments.values(), key=lambda c: c.id)),
    ).validate()
