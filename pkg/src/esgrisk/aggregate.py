"""Daily aggregation of classified messages into per-firm, per-node series.

Counts follow taxonomy closure: a message labeled ClimateChange counts for
ClimateChange, Environment and ESG_ALL on its trading day. The firm total
counts every day-assigned message of the firm, labeled or not; it is the
share denominator during detection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .taxonomy import Node, expand_to_ancestors, node_sort_key
from .trading import TradingCalendar


@dataclass(frozen=True)
class AssignedMessage:
    """A classified message after trading-day assignment."""

    firm: str
    day_index: int
    nodes: frozenset[Node]  # subcategories only; closure happens here
    score: float


@dataclass
class CategorySeries:
    """Daily counts and sentiment mass for one (firm, node) pair."""

    firm: str
    node: Node
    counts: np.ndarray  # int64, len == len(calendar)
    senti_sum: np.ndarray  # float64, sum of message scores per day
    totals: np.ndarray  # int64, all messages of the firm per day (shared)

    def sentiment(self, day_index: int) -> float | None:
        """Mean message score on a day, None when the node had no messages."""
        n = int(self.counts[day_index])
        if n == 0:
            return None
        return float(self.senti_sum[day_index] / n)

    def share(self, day_index: int) -> float:
        """Node count as a fraction of the firm's total messages that day."""
        total = int(self.totals[day_index])
        if total == 0:
            return 0.0
        return float(self.counts[day_index] / total)


class Aggregate:
    """All series for one corpus, keyed by (firm, node)."""

    def __init__(self, calendar: TradingCalendar):
        self.calendar = calendar
        self.totals: dict[str, np.ndarray] = {}
        self._counts: dict[tuple[str, Node], np.ndarray] = {}
        self._senti: dict[tuple[str, Node], np.ndarray] = {}

    def series(self, firm: str, node: Node) -> CategorySeries | None:
        key = (firm, node)
        if key not in self._counts:
            return None
        return CategorySeries(
            firm=firm,
            node=node,
            counts=self._counts[key],
            senti_sum=self._senti[key],
            totals=self.totals[firm],
        )

    def __iter__(self) -> Iterator[CategorySeries]:
        """Non-empty series in deterministic (firm, taxonomy) order."""
        for firm, node in sorted(self._counts, key=lambda k: (k[0], node_sort_key(k[1]))):
            series = self.series(firm, node)
            assert series is not None
            yield series

    def firms(self) -> list[str]:
        return sorted(self.totals)


def build_series(records: Iterable[AssignedMessage], calendar: TradingCalendar) -> Aggregate:
    """Accumulate day-assigned messages into count and sentiment series."""
    n_days = len(calendar)
    agg = Aggregate(calendar)
    for rec in records:
        totals = agg.totals.get(rec.firm)
        if totals is None:
            totals = np.zeros(n_days, dtype=np.int64)
            agg.totals[rec.firm] = totals
        totals[rec.day_index] += 1
        for node in expand_to_ancestors(rec.nodes):
            key = (rec.firm, node)
            counts = agg._counts.get(key)
            if counts is None:
                counts = np.zeros(n_days, dtype=np.int64)
                agg._counts[key] = counts
                agg._senti[key] = np.zeros(n_days, dtype=np.float64)
            counts[rec.day_index] += 1
            agg._senti[key][rec.day_index] += rec.score
    return agg
