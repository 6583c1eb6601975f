"""Abnormal message-volume event detection.

A day is an outlier when its count deviates from the trailing-window mean
by at least z sample standard deviations. The window holds exactly
window_len observations strictly before the day (no shorter history, the
day itself never contaminates its own baseline) and the default direction
is spikes only. Outliers then pass absolute-size and share filters, merge
into events within a trading-day gap, and are screened against earnings
and controversy calendars.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import date
from typing import Iterable, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .aggregate import CategorySeries
from .errors import ConfigError, NumericError
from .ingest import CalendarEventRow, EventKind
from .sentiment import DEFAULT_SIGN_THRESHOLD, Sign, classify_sign
from .taxonomy import Node
from .trading import TradingCalendar

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DetectionConfig:
    z: float = 2.0
    window_len: int = 250
    min_tweets: int = 10
    min_share: float = 0.05
    gap_days: int = 5
    exclusion_halfwidth: int = 5
    two_sided: bool = False

    def validate(self) -> None:
        if self.z <= 0:
            raise ConfigError(f"z must be positive, got {self.z}")
        if self.window_len < 2:
            raise ConfigError(f"window_len must be at least 2, got {self.window_len}")
        if self.min_tweets < 1:
            raise ConfigError(f"min_tweets must be positive, got {self.min_tweets}")
        if not 0.0 <= self.min_share <= 1.0:
            raise ConfigError(f"min_share must lie in [0, 1], got {self.min_share}")
        if self.gap_days < 0 or self.exclusion_halfwidth < 0:
            raise ConfigError("gap_days and exclusion_halfwidth must be non-negative")


@dataclass(frozen=True)
class RiskEvent:
    """One detected abnormal-volume event for a (firm, node) pair."""

    firm: str
    node: Node
    day: date
    day_index: int
    count: int
    share: float
    score: float
    sign: Sign
    merged_outlier_days: tuple[date, ...]


@dataclass(frozen=True)
class RemovedEvent:
    """An event discarded because a confound sat within the exclusion window."""

    event: RiskEvent
    distance: int  # confound index minus event index, in trading days
    kind: EventKind


def esd_outliers(counts: Sequence[int] | np.ndarray, config: DetectionConfig) -> np.ndarray:
    """Indices t where counts[t] deviates >= z sample stds from its window.

    The window is counts[t-window_len:t]; days without a complete window
    are never flagged, and a zero-variance window flags nothing.
    """
    x = np.asarray(counts, dtype=np.float64)
    w = config.window_len
    n = x.size
    if n <= w:
        return np.empty(0, dtype=np.intp)
    windows = sliding_window_view(x, w)[:-1]  # row j is the window for day j + w
    means = windows.mean(axis=1)
    stds = windows.std(axis=1, ddof=1)
    current = x[w:]
    dev = current - means
    if config.two_sided:
        dev = np.abs(dev)
    hit = (stds > 0.0) & (dev >= config.z * stds)
    return np.flatnonzero(hit) + w


def filter_and_merge(
    outlier_indices: Sequence[int] | np.ndarray,
    series: CategorySeries,
    calendar: TradingCalendar,
    config: DetectionConfig,
    sign_threshold: float = DEFAULT_SIGN_THRESHOLD,
) -> list[RiskEvent]:
    """Apply size/share filters, then merge nearby outliers into events.

    Filters drop outliers with fewer than min_tweets messages or below
    min_share of the firm's volume. Of the survivors, the first outlier
    opens an event; later outliers within gap_days trading days of that
    event day fold into it, anything further opens the next event. The
    event day stays the first outlier day.
    """
    passing: list[int] = []
    for t in sorted(int(t) for t in outlier_indices):
        count = int(series.counts[t])
        if count < config.min_tweets:
            continue
        if series.share(t) < config.min_share:
            continue
        passing.append(t)

    events: list[RiskEvent] = []
    anchor: int | None = None
    merged: list[date] = []

    def close_event() -> None:
        if anchor is None:
            return
        count = int(series.counts[anchor])
        score = series.sentiment(anchor)
        if score is None:
            # count >= min_tweets >= 1 guarantees messages existed that day
            raise NumericError(
                f"no sentiment for {series.firm}/{series.node} on day index {anchor}"
            )
        events.append(
            RiskEvent(
                firm=series.firm,
                node=series.node,
                day=calendar.date_at(anchor),
                day_index=anchor,
                count=count,
                share=series.share(anchor),
                score=score,
                sign=classify_sign(score, sign_threshold),
                merged_outlier_days=tuple(merged),
            )
        )

    for t in passing:
        if anchor is None or t - anchor > config.gap_days:
            close_event()
            anchor = t
            merged = [calendar.date_at(t)]
        else:
            merged.append(calendar.date_at(t))
    close_event()
    return events


def exclude_confounded(
    events: Iterable[RiskEvent],
    confounds: Iterable[CalendarEventRow],
    calendar: TradingCalendar,
    config: DetectionConfig,
) -> tuple[list[RiskEvent], list[RemovedEvent]]:
    """Drop events with a firm calendar confound within the exclusion window.

    Distances are measured in trading days via the calendar; a confound on
    a non-trading date counts from the next trading day. Removed events
    carry the signed distance of the nearest confound (positive means the
    confound came after the event).
    """
    by_firm: dict[str, list[tuple[int, EventKind]]] = {}
    for row in confounds:
        by_firm.setdefault(row.firm, []).append((calendar.position(row.day), row.kind))

    kept: list[RiskEvent] = []
    removed: list[RemovedEvent] = []
    for event in events:
        nearby: list[tuple[int, EventKind]] = []
        for pos, kind in by_firm.get(event.firm, ()):
            distance = pos - event.day_index
            if abs(distance) <= config.exclusion_halfwidth:
                nearby.append((distance, kind))
        if not nearby:
            kept.append(event)
            continue
        distance, kind = min(nearby, key=lambda item: (abs(item[0]), item[0]))
        removed.append(RemovedEvent(event=event, distance=distance, kind=kind))
        log.info(
            "excluded %s/%s event on %s: %s at %+d trading days",
            event.firm, event.node, event.day, kind, distance,
        )
    return kept, removed


def select_risk_events(events: Iterable[RiskEvent]) -> tuple[list[RiskEvent], list[RiskEvent]]:
    """Split events into (negative, positive) by sentiment sign.

    Negative events are the reputational-risk set the study runs on;
    positive ones are kept for diagnostics.
    """
    negatives: list[RiskEvent] = []
    positives: list[RiskEvent] = []
    for event in events:
        (negatives if event.sign is Sign.NEGATIVE else positives).append(event)
    return negatives, positives
