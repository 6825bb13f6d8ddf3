from datetime import datetime, timedelta, timezone

UTC = timezone.utc
DAY = timedelta(days=1)
WEEK = timedelta(days=7)
SECONDS_PER_DAY = 86400.0


def to_utc(value):
    """Coerce a datetime or ISO-8601 string to an aware UTC datetime.

    Naive datetimes are taken to already be in UTC.
    """
    if isinstance(value, str):
        text = value.strip()
        if text.endswith("Z") or text.endswith("z"):
            text = text[:-1] + "+00:00"
        value = datetime.fromisoformat(text)
    if not isinstance(value, datetime):
        raise TypeError(f"expected datetime or ISO-8601 string, got {type(value).__name__}")
    if value.tzinfo is None:
        return value.replace(tzinfo=UTC)
    return value.astimezone(UTC)


def format_utc(value):
    value = to_utc(value)
    if value.microsecond:
        return value.strftime("%Y-%m-%dT%H:%M:%S.%fZ")
    return value.strftime("%Y-%m-%dT%H:%M:%SZ")


def days_between(start, end):
    return (end - start).total_seconds() / SECONDS_PER_DAY


def add_years(value, years):
    try:
        return value.replace(year=value.year + years)
    except ValueError:  # Feb 29 -> Feb 28
        return value.replace(year=value.year + years, day=28)


def utc_midnight(value):
    value = to_utc(value)
    return value.replace(hour=0, minute=0, second=0, microsecond=0)
