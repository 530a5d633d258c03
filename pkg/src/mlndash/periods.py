"""Inclusive date ranges used by analysis and article filtering."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

MAX_PERIOD_DAYS = 31


@dataclass(frozen=True, order=True)
class Period:
    start: dt.date
    end: dt.date

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError(f"period start {self.start} after end {self.end}")
        if self.num_days > MAX_PERIOD_DAYS:
            raise ValueError(
                f"period {self.start}..{self.end} spans {self.num_days} days "
                f"(max {MAX_PERIOD_DAYS})"
            )

    @property
    def num_days(self) -> int:
        return (self.end - self.start).days + 1

    def __contains__(self, day: dt.date) -> bool:
        return self.start <= day <= self.end

    def days(self) -> list[dt.date]:
        return [self.start + dt.timedelta(days=i) for i in range(self.num_days)]

    def overlaps(self, other: "Period") -> bool:
        return self.start <= other.end and other.start <= self.end

    @classmethod
    def parse(cls, text: str) -> "Period":
        """Parse the canonical ``YYYY-MM-DD:YYYY-MM-DD`` form."""
        try:
            a, b = text.split(":")
            return cls(dt.date.fromisoformat(a), dt.date.fromisoformat(b))
        except ValueError as exc:
            raise ValueError(f"bad period {text!r}: {exc}") from None

    def canonical(self) -> str:
        return f"{self.start.isoformat()}:{self.end.isoformat()}"
