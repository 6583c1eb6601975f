"""Synthetic corpus generation with known ground truth.

Two generators share one seeded PCG64 stream model:

* :func:`generate` writes a complete fake corpus (messages, prices, market
  index, confound calendars, lexicon copies) in exactly the ingest file
  formats, with Poisson background chatter, planted message spikes and an
  abnormal return injected on event days.
* :func:`simulate_event_panel` yields bare return series around planted
  event days for fast event-study calibration runs.

Determinism: all randomness comes from numpy's PCG64 generator seeded
from the config, so a given (config, numpy version) pair reproduces the
corpus byte for byte. No wall clock, no platform entropy.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Iterator, Sequence
from zoneinfo import ZoneInfo

import numpy as np

from .demodata import demo_esg_lexicon_path, demo_sentiment_lexicon_path
from .errors import ConfigError, DataError
from .lexicon import load_esg_lexicon
from .sentiment import Sign, load_sentiment_lexicon
from .taxonomy import Node, expand_to_ancestors, node_sort_key, parse_node
from .trading import DEFAULT_EXCHANGE_TZ, MARKET_CLOSE, TradingCalendar

# Vocabulary for messages that should match nothing; kept disjoint from
# both demo lexicons so synthetic texts classify exactly as planted.
FILLER_WORDS: tuple[str, ...] = (
    "market", "today", "shares", "price", "session", "update", "chart",
    "volume", "week", "stocks", "morning", "open", "close", "note",
    "watch", "desk", "levels", "range", "macro", "intraday",
)


@dataclass(frozen=True)
class PlantedEvent:
    """A message spike planted on one firm, node and trading day."""

    firm_index: int
    node: Node
    day_index: int
    spike_size: float  # spike-day Poisson mean is spike_size * base_rate
    sign: Sign = Sign.NEGATIVE


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    n_firms: int = 2
    n_days: int = 300
    base_rate: float = 5.0  # per-day Poisson mean of background node chatter
    filler_rate: float = 8.0  # per-day Poisson mean of non-matching messages
    planted: tuple[PlantedEvent, ...] = ()
    injected_ar: float = 0.0  # added to the firm return on each planted day
    beta_range: tuple[float, float] = (0.8, 1.2)
    alpha_range: tuple[float, float] = (-0.0002, 0.0002)
    idio_vol: float = 0.02
    market_vol: float = 0.01
    start: date = date(2018, 1, 1)
    exchange_tz: str = DEFAULT_EXCHANGE_TZ
    background_sentiment: str = "neutral"  # or "positive"
    confounds: tuple[tuple[int, int, str], ...] = ()  # (firm_index, day_index, kind)

    def validate(self) -> None:
        if self.n_firms < 1 or self.n_days < 2:
            raise ConfigError("need at least one firm and two days")
        if self.base_rate < 0 or self.filler_rate < 0:
            raise ConfigError("rates must be non-negative")
        if self.idio_vol <= 0 or self.market_vol <= 0:
            raise ConfigError("volatilities must be positive")
        if self.background_sentiment not in ("neutral", "positive"):
            raise ConfigError(f"bad background_sentiment {self.background_sentiment!r}")
        seen: set[tuple[int, Node, int]] = set()
        for ev in self.planted:
            if not 0 <= ev.firm_index < self.n_firms:
                raise ConfigError(f"planted firm index {ev.firm_index} out of range")
            if not 0 <= ev.day_index < self.n_days:
                raise ConfigError(f"planted day index {ev.day_index} out of range")
            if ev.spike_size <= 0:
                raise ConfigError("spike_size must be positive")
            key = (ev.firm_index, ev.node, ev.day_index)
            if key in seen:
                raise ConfigError(f"duplicate planted event {key}")
            seen.add(key)
        for firm_index, day_index, kind in self.confounds:
            if not 0 <= firm_index < self.n_firms:
                raise ConfigError(f"confound firm index {firm_index} out of range")
            if not 0 <= day_index < self.n_days:
                raise ConfigError(f"confound day index {day_index} out of range")
            if kind not in ("earnings", "controversy"):
                raise ConfigError(f"bad confound kind {kind!r}")


def synth_config_from_dict(raw: dict) -> SynthConfig:
    """Build a SynthConfig from parsed YAML/JSON."""
    raw = dict(raw)
    planted = []
    for item in raw.pop("planted", []) or []:
        planted.append(
            PlantedEvent(
                firm_index=int(item["firm"]),
                node=parse_node(str(item["node"])),
                day_index=int(item["day"]),
                spike_size=float(item.get("spike", 10.0)),
                sign=Sign(str(item.get("sign", "negative"))),
            )
        )
    confounds = []
    for item in raw.pop("confounds", []) or []:
        confounds.append((int(item["firm"]), int(item["day"]), str(item["kind"])))
    if "start" in raw:
        raw["start"] = date.fromisoformat(str(raw["start"]))
    if "beta_range" in raw:
        raw["beta_range"] = tuple(float(v) for v in raw["beta_range"])
    if "alpha_range" in raw:
        raw["alpha_range"] = tuple(float(v) for v in raw["alpha_range"])
    known = set(SynthConfig.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown synth config keys: {sorted(unknown)}")
    return SynthConfig(planted=tuple(planted), confounds=tuple(confounds), **raw)


def business_days(start: date, n_days: int) -> list[date]:
    """The first n_days weekdays on/after start (no holiday modeling)."""
    days: list[date] = []
    cur = start
    while len(days) < n_days:
        if cur.weekday() < 5:
            days.append(cur)
        cur += timedelta(days=1)
    return days


def firm_name(index: int) -> str:
    return f"FIRM{index:02d}"


@dataclass(frozen=True)
class GroundTruth:
    """What was planted, in both raw and taxonomy-expanded form."""

    planted: tuple[tuple[str, Node, date, float, Sign], ...]
    injected_ar: float
    truth_keys: frozenset[tuple[str, Node, date]]

    def negative_keys(self) -> frozenset[tuple[str, Node, date]]:
        """Expanded keys for negatively signed planted events only."""
        keys: set[tuple[str, Node, date]] = set()
        for firm, node, day, _, sign in self.planted:
            if sign is Sign.NEGATIVE:
                for anc in expand_to_ancestors({node}):
                    keys.add((firm, anc, day))
        return frozenset(keys)

    def to_json(self) -> dict:
        return {
            "injected_ar": self.injected_ar,
            "planted": [
                {
                    "firm": firm,
                    "node": node.value,
                    "date": day.isoformat(),
                    "spike_size": spike,
                    "sign": sign.value,
                }
                for firm, node, day, spike, sign in self.planted
            ],
            "truth": [
                {"firm": firm, "node": node.value, "date": day.isoformat()}
                for firm, node, day in sorted(
                    self.truth_keys, key=lambda k: (k[0], node_sort_key(k[1]), k[2])
                )
            ],
        }

    @classmethod
    def from_json(cls, raw: dict) -> "GroundTruth":
        planted = tuple(
            (
                str(item["firm"]),
                parse_node(str(item["node"])),
                date.fromisoformat(str(item["date"])),
                float(item.get("spike_size", 0.0)),
                Sign(str(item.get("sign", "negative"))),
            )
            for item in raw.get("planted", [])
        )
        truth = frozenset(
            (str(item["firm"]), parse_node(str(item["node"])), date.fromisoformat(str(item["date"])))
            for item in raw.get("truth", [])
        )
        return cls(planted=planted, injected_ar=float(raw.get("injected_ar", 0.0)), truth_keys=truth)

    @classmethod
    def load(cls, path: str | Path) -> "GroundTruth":
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_json(json.load(fh))
        except (OSError, ValueError, KeyError) as exc:
            raise DataError(f"cannot read ground truth {path}: {exc}") from exc


def _terms_by_node(path: Path) -> dict[Node, list[str]]:
    grouped: dict[Node, list[str]] = {}
    for entry in load_esg_lexicon(path):
        grouped.setdefault(entry.node, []).append(entry.text)
    return grouped


def _sentiment_words(path: Path) -> tuple[list[str], list[str]]:
    negative: list[str] = []
    positive: list[str] = []
    for entry in load_sentiment_lexicon(path):
        text = " ".join(entry.term)
        if entry.weight < 0:
            negative.append(text)
        elif entry.weight > 0:
            positive.append(text)
    return negative, positive


class _MessageWriter:
    def __init__(self, path: Path):
        self._fh = open(path, "w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._fh)
        self._writer.writerow(["id", "firm", "timestamp", "text"])
        self._counter = 0

    def write(self, firm: str, ts: datetime, text: str) -> None:
        self._counter += 1
        self._writer.writerow([f"m{self._counter:07d}", firm, ts.isoformat(), text])

    def close(self) -> None:
        self._fh.close()


def _day_windows(
    calendar_days: Sequence[date], tz: str
) -> list[tuple[datetime, int]]:
    """Per trading day: UTC start of its close-to-close window and span in seconds."""
    zone = ZoneInfo(tz)
    closes_utc: list[datetime] = []
    first_prev = datetime.combine(calendar_days[0] - timedelta(days=1), MARKET_CLOSE, zone)
    closes_utc.append(first_prev.astimezone(timezone.utc))
    for day in calendar_days:
        closes_utc.append(datetime.combine(day, MARKET_CLOSE, zone).astimezone(timezone.utc))
    windows = []
    for i in range(len(calendar_days)):
        lower = closes_utc[i]
        span = int((closes_utc[i + 1] - lower).total_seconds())
        windows.append((lower, span))
    return windows


def generate(config: SynthConfig, outdir: str | Path) -> GroundTruth:
    """Write a synthetic corpus under outdir and return its ground truth.

    Files produced: messages.csv, prices.csv, market_index.csv,
    earnings.csv, controversy.csv, esg_lexicon.csv, sentiment_lexicon.csv,
    ground_truth.json.
    """
    config.validate()
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(config.seed)
    calendar_days = business_days(config.start, config.n_days)
    windows = _day_windows(calendar_days, config.exchange_tz)

    terms = _terms_by_node(demo_esg_lexicon_path())
    negative_words, positive_words = _sentiment_words(demo_sentiment_lexicon_path())
    fillers = np.array(FILLER_WORDS)

    planted_by_firm_day: dict[tuple[int, int], list[PlantedEvent]] = {}
    for ev in config.planted:
        planted_by_firm_day.setdefault((ev.firm_index, ev.day_index), []).append(ev)
    background_nodes: dict[int, list[Node]] = {}
    for ev in config.planted:
        nodes = background_nodes.setdefault(ev.firm_index, [])
        if ev.node not in nodes:
            nodes.append(ev.node)
    for nodes in background_nodes.values():
        nodes.sort(key=node_sort_key)

    def filler_words(k_min: int = 2, k_max: int = 5) -> str:
        k = int(rng.integers(k_min, k_max + 1))
        return " ".join(rng.choice(fillers, size=k, replace=True))

    def pick(words: Sequence[str]) -> str:
        return str(words[int(rng.integers(0, len(words)))])

    def stamp(day_index: int) -> datetime:
        lower, span = windows[day_index]
        return lower + timedelta(seconds=int(rng.integers(1, span + 1)))

    market = rng.normal(0.0, config.market_vol, config.n_days)

    writer = _MessageWriter(outdir / "messages.csv")
    try:
        for fi in range(config.n_firms):
            firm = firm_name(fi)
            cashtag = f"${firm}"
            bg_nodes = background_nodes.get(fi, [])
            for di in range(config.n_days):
                for _ in range(int(rng.poisson(config.filler_rate))):
                    writer.write(firm, stamp(di), f"{cashtag} {filler_words(3, 6)}")
                for node in bg_nodes:
                    for _ in range(int(rng.poisson(config.base_rate))):
                        term = pick(terms[node])
                        if config.background_sentiment == "positive":
                            text = f"{cashtag} {filler_words(1, 2)} {term} {pick(positive_words)}"
                        else:
                            text = f"{cashtag} {filler_words(1, 2)} {term}"
                        writer.write(firm, stamp(di), text)
                for ev in planted_by_firm_day.get((fi, di), ()):
                    words = negative_words if ev.sign is Sign.NEGATIVE else positive_words
                    n_spike = int(rng.poisson(config.base_rate * ev.spike_size))
                    for _ in range(n_spike):
                        text = (
                            f"{cashtag} {pick(terms[ev.node])} {pick(words)} "
                            f"{filler_words(1, 3)}"
                        )
                        writer.write(firm, stamp(di), text)
    finally:
        writer.close()

    injected_days: dict[int, set[int]] = {}
    for ev in config.planted:
        injected_days.setdefault(ev.firm_index, set()).add(ev.day_index)

    with open(outdir / "prices.csv", "w", newline="", encoding="utf-8") as fh:
        pw = csv.writer(fh)
        pw.writerow(["firm", "date", "close", "return"])
        for fi in range(config.n_firms):
            firm = firm_name(fi)
            alpha = float(rng.uniform(*config.alpha_range))
            beta = float(rng.uniform(*config.beta_range))
            eps = rng.normal(0.0, config.idio_vol, config.n_days)
            rets = alpha + beta * market + eps
            for di in injected_days.get(fi, ()):
                rets[di] += config.injected_ar
            close = 100.0
            for di in range(config.n_days):
                close *= 1.0 + rets[di]
                pw.writerow([firm, calendar_days[di].isoformat(), str(close), str(float(rets[di]))])

    with open(outdir / "market_index.csv", "w", newline="", encoding="utf-8") as fh:
        mw = csv.writer(fh)
        mw.writerow(["date", "return"])
        for di in range(config.n_days):
            mw.writerow([calendar_days[di].isoformat(), str(float(market[di]))])

    confound_rows = {"earnings": [], "controversy": []}
    for fi, di, kind in config.confounds:
        confound_rows[kind].append((firm_name(fi), calendar_days[di].isoformat()))
    for kind in ("earnings", "controversy"):
        with open(outdir / f"{kind}.csv", "w", newline="", encoding="utf-8") as fh:
            cw = csv.writer(fh)
            cw.writerow(["firm", "date"])
            for row in sorted(confound_rows[kind]):
                cw.writerow(row)

    (outdir / "esg_lexicon.csv").write_bytes(demo_esg_lexicon_path().read_bytes())
    (outdir / "sentiment_lexicon.csv").write_bytes(demo_sentiment_lexicon_path().read_bytes())

    planted_resolved = tuple(
        (firm_name(ev.firm_index), ev.node, calendar_days[ev.day_index], ev.spike_size, ev.sign)
        for ev in config.planted
    )
    truth_keys: set[tuple[str, Node, date]] = set()
    for firm, node, day, _, _ in planted_resolved:
        for anc in expand_to_ancestors({node}):
            truth_keys.add((firm, anc, day))
    truth = GroundTruth(
        planted=planted_resolved,
        injected_ar=config.injected_ar,
        truth_keys=frozenset(truth_keys),
    )
    with open(outdir / "ground_truth.json", "w", encoding="utf-8") as fh:
        json.dump(truth.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return truth


def simulate_event_panel(
    rng: np.random.Generator,
    n_events: int,
    *,
    est_len: int = 120,
    post_days: int = 1,
    idio_vol: float = 0.02,
    market_vol: float = 0.01,
    beta_range: tuple[float, float] = (0.8, 1.2),
    alpha_range: tuple[float, float] = (-0.0002, 0.0002),
    injected_ar: float = 0.0,
) -> Iterator[tuple[np.ndarray, np.ndarray, int]]:
    """Yield (firm_returns, market_returns, event_index) triples.

    Each event gets an independent market and firm series just long enough
    for an estimation window of est_len ending two days before the event
    plus post_days after it. The injected abnormal return lands on the
    event day only.
    """
    event_index = est_len + 1
    n = event_index + post_days + 1
    for _ in range(n_events):
        market = rng.normal(0.0, market_vol, n)
        alpha = float(rng.uniform(*alpha_range))
        beta = float(rng.uniform(*beta_range))
        firm = alpha + beta * market + rng.normal(0.0, idio_vol, n)
        firm[event_index] += injected_ar
        yield firm, market, event_index


@dataclass(frozen=True)
class DetectionScore:
    precision: float | None  # None when nothing was detected
    recall: float | None  # None when the truth set is empty
    matched: int
    n_detected: int
    n_truth: int


def evaluate_detection(
    detected: Iterable[tuple[str, Node, date]],
    truth: Iterable[tuple[str, Node, date]],
    calendar: TradingCalendar,
    tolerance: int = 1,
) -> DetectionScore:
    """Set matching of (firm, node, day) keys with +/- tolerance trading days.

    Each detected event can satisfy at most one truth entry; ties go to
    the nearest day, then the earlier one.
    """
    detected = list(detected)
    truth = sorted(set(truth), key=lambda k: (k[0], node_sort_key(k[1]), k[2]))
    pool: dict[tuple[str, Node], list[tuple[int, bool]]] = {}
    for firm, node, day in detected:
        pool.setdefault((firm, node), []).append((calendar.index_of(day), False))
    for candidates in pool.values():
        candidates.sort()

    matched = 0
    for firm, node, day in truth:
        idx = calendar.index_of(day)
        candidates = pool.get((firm, node), [])
        best: int | None = None
        for j, (pos, used) in enumerate(candidates):
            if used or abs(pos - idx) > tolerance:
                continue
            if best is None or (abs(pos - idx), pos) < (
                abs(candidates[best][0] - idx),
                candidates[best][0],
            ):
                best = j
        if best is not None:
            pos, _ = candidates[best]
            candidates[best] = (pos, True)
            matched += 1

    n_detected = len(detected)
    n_truth = len(truth)
    return DetectionScore(
        precision=(matched / n_detected) if n_detected else None,
        recall=(matched / n_truth) if n_truth else None,
        matched=matched,
        n_detected=n_detected,
        n_truth=n_truth,
    )
