"""Dictionary sentiment scoring and sign classification.

A message scores the mean weight of every matched sentiment term
occurrence, 0.0 when nothing matches. The sign rule is deliberately
asymmetric: scores below the threshold (default 0.05) count as negative,
so weak or ambiguous days are treated as risk-relevant.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataError
from .lexicon import MAX_TERM_TOKENS, TokenMatcher, _require_columns, tokenize

DEFAULT_SIGN_THRESHOLD = 0.05


class Sign(enum.Enum):
    NEGATIVE = "negative"
    POSITIVE = "positive"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SentimentEntry:
    term: tuple[str, ...]
    weight: float


def load_sentiment_lexicon(path: str | Path) -> list[SentimentEntry]:
    """Read a term,weight CSV; weights must be finite and within [-1, 1]."""
    entries: list[SentimentEntry] = []
    seen: set[tuple[str, ...]] = set()
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read sentiment lexicon {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        _require_columns(reader, path, ("term", "weight"))
        for row in reader:
            raw_term = (row.get("term") or "").strip()
            raw_weight = (row.get("weight") or "").strip()
            if not raw_term or not raw_weight:
                raise DataError(f"{path}:{reader.line_num}: term and weight are both required")
            term = tuple(tokenize(raw_term))
            if not term or len(term) > MAX_TERM_TOKENS:
                raise DataError(f"{path}:{reader.line_num}: unusable term {raw_term!r}")
            try:
                weight = float(raw_weight)
            except ValueError:
                raise DataError(
                    f"{path}:{reader.line_num}: weight {raw_weight!r} is not a number"
                ) from None
            if not math.isfinite(weight) or not -1.0 <= weight <= 1.0:
                raise DataError(f"{path}:{reader.line_num}: weight {weight} outside [-1, 1]")
            if term in seen:
                raise DataError(f"{path}:{reader.line_num}: duplicate sentiment term {raw_term!r}")
            seen.add(term)
            entries.append(SentimentEntry(term=term, weight=weight))
    return entries


class SentimentScorer:
    """Scores token sequences against a sentiment lexicon."""

    def __init__(self, entries: Iterable[SentimentEntry]):
        self.entries = list(entries)
        self._matcher = TokenMatcher((e.term, e.weight) for e in self.entries)

    def score_tokens(self, tokens: Sequence[str]) -> float:
        """Mean weight over matched term occurrences; 0.0 if none match."""
        hits = self._matcher.find(tokens)
        if not hits:
            return 0.0
        weights = [payload for _, _, payload in hits]
        return float(sum(weights) / len(weights))

    def score_message(self, text: str) -> float:
        return self.score_tokens(tokenize(text))


def daily_sentiment(scores: Sequence[float]) -> float | None:
    """Mean message score for one firm, node and day; None when no messages."""
    if not scores:
        return None
    return float(sum(scores) / len(scores))


def classify_sign(score: float, threshold: float = DEFAULT_SIGN_THRESHOLD) -> Sign:
    """Positive iff score >= threshold; the boundary itself is Positive."""
    return Sign.POSITIVE if score >= threshold else Sign.NEGATIVE
