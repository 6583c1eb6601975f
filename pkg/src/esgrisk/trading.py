"""Trading calendar and close-to-close day assignment.

The calendar is whatever dates the market index file contains. A message
belongs to trading day d when it was posted after the 4 p.m. exchange
close of the previous trading day and no later than 16:00:00 on d;
weekend and holiday posts roll forward to the next trading day.
"""

from __future__ import annotations

from bisect import bisect_left
from datetime import date, datetime, time, timedelta
from typing import Iterable, Sequence
from zoneinfo import ZoneInfo

from .errors import DataError
from .ingest import MarketIndexRow

MARKET_CLOSE = time(16, 0)
DEFAULT_EXCHANGE_TZ = "America/New_York"


class TradingCalendar:
    """Strictly increasing sequence of trading dates with index lookups."""

    def __init__(self, dates: Sequence[date]):
        if not dates:
            raise DataError("trading calendar is empty")
        dates = tuple(dates)
        for prev, cur in zip(dates, dates[1:]):
            if cur <= prev:
                raise DataError(f"calendar dates not strictly increasing at {cur}")
        self.dates: tuple[date, ...] = dates
        self._index = {d: i for i, d in enumerate(dates)}

    @classmethod
    def from_market_index(cls, rows: Iterable[MarketIndexRow]) -> "TradingCalendar":
        return cls(sorted(row.day for row in rows))

    def __len__(self) -> int:
        return len(self.dates)

    def __contains__(self, day: date) -> bool:
        return day in self._index

    def date_at(self, idx: int) -> date:
        return self.dates[idx]

    def index_of(self, day: date) -> int:
        """Exact index of a trading date; DataError when not in the calendar."""
        try:
            return self._index[day]
        except KeyError:
            raise DataError(f"{day} is not a trading day in this calendar") from None

    def position(self, day: date) -> int:
        """Virtual index: count of trading days strictly before `day`.

        For a trading date this equals index_of; for other dates it is the
        index of the next trading day on/after, or len(self) past the end.
        """
        return bisect_left(self.dates, day)


def assign_trading_day(
    ts_utc: datetime,
    calendar: TradingCalendar,
    exchange_tz: str = DEFAULT_EXCHANGE_TZ,
) -> date | None:
    """Map a UTC timestamp to the trading day whose close it precedes.

    Returns None for timestamps that cannot be assigned: after the final
    close of the calendar, or before the calendar's first day (there the
    previous close is unknowable, so assignment would be a guess).
    """
    idx = assign_trading_index(ts_utc, calendar, exchange_tz)
    return calendar.date_at(idx) if idx is not None else None


def assign_trading_index(
    ts_utc: datetime,
    calendar: TradingCalendar,
    exchange_tz: str = DEFAULT_EXCHANGE_TZ,
) -> int | None:
    local = ts_utc.astimezone(ZoneInfo(exchange_tz))
    candidate = local.date()
    if local.time() > MARKET_CLOSE:  # 16:00:00 sharp still belongs to the closing day
        candidate = candidate + timedelta(days=1)
    if candidate < calendar.dates[0]:
        return None
    idx = calendar.position(candidate)
    if idx >= len(calendar):
        return None
    return idx
