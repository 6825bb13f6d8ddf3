from .fixtures import dumps_fixture, event_set_from_dict, event_set_to_dict, load_fixture, save_fixture
from .records import (
    CommentRecord,
    CommitRecord,
    EventSet,
    IssueRecord,
    PullRequestRecord,
    RepoMetadata,
    RepoRef,
    event_set_problems,
)
from .screening import ScreeningVerdict, screen_repository
from .source import CachePolicy, Response, ResponseCache, RestSource, RetryPolicy, fetch_events

__all__ = [
    "CachePolicy", "CommentRecord", "CommitRecord", "EventSet", "IssueRecord",
    "PullRequestRecord", "RepoMetadata", "RepoRef", "Response", "ResponseCache",
    "RestSource", "RetryPolicy", "ScreeningVerdict", "dumps_fixture",
    "event_set_from_dict", "event_set_problems", "event_set_to_dict", "fetch_events",
    "load_fixture", "save_fixture", "screen_repository",
]
