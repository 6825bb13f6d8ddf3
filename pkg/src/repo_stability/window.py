from dataclasses import dataclass
from datetime import datetime, timedelta

from ._time import add_years, to_utc, utc_midnight


@dataclass(frozen=True)
class AnalysisWindow:
    """Half-open interval ``[start, end)`` that every metric is bounded to."""

    start: datetime
    end: datetime

    def __post_init__(self):
        object.__setattr__(self, "start", to_utc(self.start))
        object.__setattr__(self, "end", to_utc(self.end))
        if not self.end > self.start:
            raise ValueError(f"window end {self.end} must be after start {self.start}")

    @classmethod
    def ending_at(cls, end, years=5):
        end = to_utc(end)
        return cls(add_years(end, -years), end)

    @classmethod
    def default(cls, now=None, years=5):
        """Window of ``years`` ending at the most recent UTC midnight."""
        now = to_utc(now) if now is not None else datetime.now().astimezone()
        return cls.ending_at(utc_midnight(now), years)

    @property
    def duration(self) -> timedelta:
        return self.end - self.start

    def contains(self, ts) -> bool:
        return self.start <= ts < self.end

    def shift_start(self, start):
        return AnalysisWindow(start, self.end)
