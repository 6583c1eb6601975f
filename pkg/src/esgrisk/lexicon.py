"""Tokenization and lexicon-based multi-label classification.

Terms are short token sequences (one to five tokens). Matching is exact
contiguous subsequence matching over the message tokens, implemented with
an n-gram hash index so a message costs O(tokens * max_term_len) lookups
regardless of lexicon size.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataError
from .taxonomy import Node, parse_node

MAX_TERM_TOKENS = 5

_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_MENTION_RE = re.compile(r"@\w+")


def tokenize(text: str) -> list[str]:
    """Lowercase and split a raw message into matchable tokens.

    URLs and @-mentions are removed entirely. Cashtags and hashtags keep
    their word with the marker stripped ("$AAPL" -> "aapl",
    "#ClimateChange" -> "climatechange"). Everything else splits on
    punctuation and whitespace.
    """
    text = text.lower()
    text = _URL_RE.sub(" ", text)
    text = _MENTION_RE.sub(" ", text)
    # $ and # are not word characters, so cashtag/hashtag markers fall away
    return re.findall(r"\w+", text)


@dataclass(frozen=True)
class LexiconEntry:
    """One lexicon line: a tokenized term mapped to a taxonomy node."""

    term: tuple[str, ...]
    node: Node

    @property
    def text(self) -> str:
        return " ".join(self.term)


class TokenMatcher:
    """n-gram index over tokenized terms with arbitrary payloads."""

    def __init__(self, entries: Iterable[tuple[tuple[str, ...], object]]):
        self._index: dict[tuple[str, ...], list[object]] = {}
        self.max_len = 1
        for term, payload in entries:
            if not term:
                raise DataError("empty term cannot be indexed")
            self._index.setdefault(term, []).append(payload)
            self.max_len = max(self.max_len, len(term))

    def find(self, tokens: Sequence[str]) -> list[tuple[int, tuple[str, ...], object]]:
        """All occurrences of indexed terms in a token sequence.

        Returns (start position, term, payload) triples; overlapping and
        repeated occurrences are all reported.
        """
        hits = []
        n = len(tokens)
        tokens = tuple(tokens)
        for start in range(n):
            for length in range(1, min(self.max_len, n - start) + 1):
                gram = tokens[start : start + length]
                for payload in self._index.get(gram, ()):
                    hits.append((start, gram, payload))
        return hits


def load_esg_lexicon(path: str | Path) -> list[LexiconEntry]:
    """Read a term,node CSV into lexicon entries.

    Unknown node names and duplicate (term, node) pairs are fatal: both
    indicate a broken lexicon rather than a skippable row.
    """
    entries: list[LexiconEntry] = []
    seen: set[tuple[tuple[str, ...], Node]] = set()
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read lexicon {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        _require_columns(reader, path, ("term", "node"))
        for row in reader:
            raw_term = (row.get("term") or "").strip()
            raw_node = (row.get("node") or "").strip()
            if not raw_term or not raw_node:
                raise DataError(f"{path}:{reader.line_num}: term and node are both required")
            term = tuple(tokenize(raw_term))
            if not term:
                raise DataError(f"{path}:{reader.line_num}: term {raw_term!r} has no tokens")
            if len(term) > MAX_TERM_TOKENS:
                raise DataError(
                    f"{path}:{reader.line_num}: term {raw_term!r} exceeds "
                    f"{MAX_TERM_TOKENS} tokens"
                )
            node = parse_node(raw_node)
            key = (term, node)
            if key in seen:
                raise DataError(f"{path}:{reader.line_num}: duplicate entry {raw_term!r} -> {node}")
            seen.add(key)
            entries.append(LexiconEntry(term=term, node=node))
    return entries


def _require_columns(reader: csv.DictReader, path: Path, required: tuple[str, ...]) -> None:
    names = reader.fieldnames or []
    missing = [c for c in required if c not in names]
    if missing:
        raise DataError(f"{path}: missing required column(s) {missing}, found {names}")


@dataclass(frozen=True)
class ClassifiedMessage:
    """Subcategory labels and the terms that produced them.

    `nodes` holds subcategories only; pillar and ESG_ALL membership is
    computed downstream via taxonomy closure.
    """

    message_id: str
    nodes: frozenset[Node]
    matched_terms: tuple[str, ...]


class EsgClassifier:
    """Multi-label classifier over a loaded ESG lexicon."""

    def __init__(self, entries: Iterable[LexiconEntry]):
        self.entries = list(entries)
        self._matcher = TokenMatcher((e.term, e.node) for e in self.entries)

    def classify_tokens(self, message_id: str, tokens: Sequence[str]) -> ClassifiedMessage:
        hits = self._matcher.find(tokens)
        nodes = frozenset(payload for _, _, payload in hits)  # type: ignore[misc]
        terms: list[str] = []
        for _, gram, _ in hits:
            text = " ".join(gram)
            if text not in terms:
                terms.append(text)
        return ClassifiedMessage(message_id=message_id, nodes=nodes, matched_terms=tuple(terms))

    def classify(self, message_id: str, text: str) -> ClassifiedMessage:
        return self.classify_tokens(message_id, tokenize(text))
