from dataclasses import dataclass

from .._time import add_years, to_utc
from .records import RepoMetadata

MIN_STARS = 10_000
MIN_FORKS = 9_000
MIN_AGE_YEARS = 10


@dataclass(frozen=True)
class ScreeningVerdict:
    passed: bool
    failed: tuple = ()


def screen_repository(meta: RepoMetadata, now) -> ScreeningVerdict:
    """Check a repository against the cohort inclusion rules.

    Stars and forks are strict lower bounds; age is inclusive, measured in
    calendar years. Every failing criterion is listed, not just the first.
    """
    now = to_utc(now)
    failed = []
    if not meta.stars > MIN_STARS:
        failed.append("stars")
    if not meta.forks > MIN_FORKS:
        failed.append("forks")
    if add_years(meta.created_at, MIN_AGE_YEARS) > now:
        failed.append("age")
    if meta.is_educational:
        failed.append("educational")
    if meta.is_archived:
        failed.append("archived")
    return ScreeningVerdict(passed=not failed, failed=tuple(failed))
