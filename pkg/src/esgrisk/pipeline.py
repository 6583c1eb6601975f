"""Stage orchestration: classify -> detect -> study, plus config plumbing.

Stages communicate through files so each can run standalone:

* classify: messages + lexicons -> classified.csv (one row per valid
  message, labeled or not) and an ingest report.
* detect: classified.csv + market index + confound calendars ->
  events.csv with kept/removed flags, counts and removal histogram.
* study: events.csv + prices + market index -> results files, SCAAR
  curves and a drop log.

Every run writes resolved_config.yaml into the output directory so the
effective parameters are always on disk next to the artifacts.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import yaml

from .aggregate import AssignedMessage, build_series
from .detect import (
    DetectionConfig,
    RemovedEvent,
    RiskEvent,
    esd_outliers,
    exclude_confounded,
    filter_and_merge,
    select_risk_events,
)
from .errors import ConfigError, DataError
from .ingest import (
    EventKind,
    IngestReport,
    iter_messages,
    parse_timestamp,
    read_calendar_events,
    read_market_index,
    read_prices,
)
from .lexicon import EsgClassifier, load_esg_lexicon, tokenize
from .report import (
    render_event_counts_csv,
    render_removal_histogram_csv,
    render_results_csv,
    render_results_text,
    render_scaar_curve_csv,
)
from .sentiment import DEFAULT_SIGN_THRESHOLD, SentimentScorer, load_sentiment_lexicon
from .study import (
    EstimationConfig,
    EventAbnormals,
    EventDropped,
    NodeStudyResult,
    aggregate_node,
    align_firm_returns,
    align_market_returns,
    compute_event_abnormals,
)
from .taxonomy import REPORT_ORDER, Node, expand_to_ancestors, node_sort_key, parse_node
from .trading import DEFAULT_EXCHANGE_TZ, TradingCalendar, assign_trading_index

log = logging.getLogger(__name__)

CLASSIFIED_COLUMNS = ["id", "firm", "timestamp", "nodes", "terms", "score"]
EVENT_COLUMNS = [
    "firm", "node", "date", "count", "share", "sentiment_score",
    "sign", "kept", "removal_reason", "distance_to_confound",
]


@dataclass(frozen=True)
class PathsConfig:
    messages: str | None = None
    prices: str | None = None
    market_index: str | None = None
    earnings: str | None = None
    controversy: str | None = None
    esg_lexicon: str | None = None
    sentiment_lexicon: str | None = None
    classified: str | None = None  # defaults to <outdir>/classified.csv
    events: str | None = None  # defaults to <outdir>/events.csv
    outdir: str = "out"


@dataclass(frozen=True)
class RunConfig:
    paths: PathsConfig = field(default_factory=PathsConfig)
    detection: DetectionConfig = field(default_factory=DetectionConfig)
    study: EstimationConfig = field(default_factory=EstimationConfig)
    sentiment_threshold: float = DEFAULT_SIGN_THRESHOLD
    exchange_tz: str = DEFAULT_EXCHANGE_TZ
    source_tz: str = "UTC"
    parallelism: int = 1
    robustness_est_len: int | None = None

    def validate(self) -> None:
        self.detection.validate()
        self.study.validate()
        if self.parallelism < 1:
            raise ConfigError(f"parallelism must be at least 1, got {self.parallelism}")

    def outdir(self) -> Path:
        return Path(self.paths.outdir)

    def classified_path(self) -> Path:
        return Path(self.paths.classified) if self.paths.classified else self.outdir() / "classified.csv"

    def events_path(self) -> Path:
        return Path(self.paths.events) if self.paths.events else self.outdir() / "events.csv"

    def require_path(self, name: str) -> Path:
        value = getattr(self.paths, name)
        if not value:
            raise ConfigError(f"paths.{name} is required for this command")
        path = Path(value)
        if not path.exists():
            raise ConfigError(f"paths.{name}: {path} does not exist")
        return path


def _build_dataclass(cls, raw: dict, context: str):
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown {context} config keys: {sorted(unknown)}")
    return cls(**raw)


def run_config_from_dict(raw: dict | None) -> RunConfig:
    raw = dict(raw or {})
    paths = _build_dataclass(PathsConfig, dict(raw.pop("paths", {}) or {}), "paths")
    detection = _build_dataclass(DetectionConfig, dict(raw.pop("detection", {}) or {}), "detection")
    study_raw = dict(raw.pop("study", {}) or {})
    if "event_windows" in study_raw:
        study_raw["event_windows"] = tuple(
            (int(lo), int(hi)) for lo, hi in study_raw["event_windows"]
        )
    if "saar_offsets" in study_raw:
        study_raw["saar_offsets"] = tuple(int(o) for o in study_raw["saar_offsets"])
    study = _build_dataclass(EstimationConfig, study_raw, "study")
    cfg = _build_dataclass(
        RunConfig, {**raw, "paths": paths, "detection": detection, "study": study}, "run"
    )
    cfg.validate()
    return cfg


def _deep_merge(base: dict, extra: dict) -> dict:
    out = dict(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def load_run_config(path: str | Path | None, overrides: dict | None = None) -> RunConfig:
    """Read a YAML config file and apply nested overrides on top."""
    raw: dict = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                loaded = yaml.safe_load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"bad YAML in {path}: {exc}") from exc
        if loaded is not None:
            if not isinstance(loaded, dict):
                raise ConfigError(f"config {path} must be a mapping")
            raw = loaded
    if overrides:
        raw = _deep_merge(raw, overrides)
    return run_config_from_dict(raw)


def _as_plain(obj) -> dict:
    # json round-trip turns tuples into lists and rejects anything exotic
    return json.loads(json.dumps(dataclasses.asdict(obj)))


def write_resolved_config(cfg: RunConfig, outdir: Path) -> Path:
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "resolved_config.yaml"
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(_as_plain(cfg), fh, sort_keys=True, default_flow_style=False)
    return path


# --- classify stage ---------------------------------------------------------

_WORKER_ENGINE: "_ClassifyEngine | None" = None


class _ClassifyEngine:
    def __init__(self, esg_lexicon_path: str, sentiment_lexicon_path: str):
        self.classifier = EsgClassifier(load_esg_lexicon(esg_lexicon_path))
        self.scorer = SentimentScorer(load_sentiment_lexicon(sentiment_lexicon_path))

    def rows(self, batch: Sequence[tuple[str, str]]) -> list[tuple[str, str, str]]:
        out = []
        for msg_id, text in batch:
            tokens = tokenize(text)
            classified = self.classifier.classify_tokens(msg_id, tokens)
            nodes = "|".join(n.value for n in sorted(classified.nodes, key=node_sort_key))
            terms = "|".join(classified.matched_terms)
            score = self.scorer.score_tokens(tokens)
            out.append((nodes, terms, str(score)))
        return out


def _init_worker(esg_path: str, senti_path: str) -> None:
    global _WORKER_ENGINE
    _WORKER_ENGINE = _ClassifyEngine(esg_path, senti_path)


def _worker_rows(batch: Sequence[tuple[str, str]]) -> list[tuple[str, str, str]]:
    assert _WORKER_ENGINE is not None
    return _WORKER_ENGINE.rows(batch)


def _batched(items: Iterator, size: int) -> Iterator[list]:
    batch: list = []
    for item in items:
        batch.append(item)
        if len(batch) >= size:
            yield batch
            batch = []
    if batch:
        yield batch


@dataclass
class ClassifyOutputs:
    classified_path: Path
    report: IngestReport
    node_counts: dict[Node, int]
    n_messages: int


def run_classify(cfg: RunConfig) -> ClassifyOutputs:
    """Label and score every valid message; write the classified artifact."""
    messages_path = cfg.require_path("messages")
    esg_path = cfg.require_path("esg_lexicon")
    senti_path = cfg.require_path("sentiment_lexicon")
    outdir = cfg.outdir()
    outdir.mkdir(parents=True, exist_ok=True)
    out_path = cfg.classified_path()

    report = IngestReport(path=str(messages_path))
    stream = iter_messages(messages_path, source_tz=cfg.source_tz, report=report)
    node_counts: dict[Node, int] = {node: 0 for node in REPORT_ORDER}
    n_messages = 0

    pool: ProcessPoolExecutor | None = None
    if cfg.parallelism > 1:
        pool = ProcessPoolExecutor(
            max_workers=cfg.parallelism,
            initializer=_init_worker,
            initargs=(str(esg_path), str(senti_path)),
        )
    engine = None if pool else _ClassifyEngine(str(esg_path), str(senti_path))

    try:
        with open(out_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CLASSIFIED_COLUMNS)
            for mega in _batched(stream, 20000):
                batches = [mega[i : i + 2000] for i in range(0, len(mega), 2000)]
                payloads = [[(m.id, m.text) for m in b] for b in batches]
                if pool is not None:
                    results = pool.map(_worker_rows, payloads)
                else:
                    assert engine is not None
                    results = (engine.rows(p) for p in payloads)
                for batch, rows in zip(batches, results):
                    for msg, (nodes, terms, score) in zip(batch, rows):
                        writer.writerow(
                            [msg.id, msg.firm, msg.timestamp.isoformat(), nodes, terms, score]
                        )
                        n_messages += 1
                        if nodes:
                            # Summary counts include ancestors: a subcategory
                            # message is also a pillar and ESG_ALL message.
                            labels = frozenset(parse_node(n) for n in nodes.split("|"))
                            for node in expand_to_ancestors(labels):
                                node_counts[node] += 1
    finally:
        if pool is not None:
            pool.shutdown()

    with open(outdir / "ingest_report_messages.json", "w", encoding="utf-8") as fh:
        json.dump(report.as_dict(), fh, indent=2)
        fh.write("\n")
    return ClassifyOutputs(
        classified_path=out_path, report=report, node_counts=node_counts, n_messages=n_messages
    )


# --- detect stage ------------------------------------------------------------


@dataclass
class DetectOutputs:
    events_path: Path
    calendar: TradingCalendar
    detected: list[RiskEvent]  # everything that survived filters and merging
    kept: list[RiskEvent]  # negative sign, not confounded
    positives: list[RiskEvent]
    removed: list[RemovedEvent]
    dropped_messages: int  # timestamps outside the calendar


@dataclass
class _DropCounter:
    count: int = 0


def _iter_classified(path: Path, calendar: TradingCalendar, exchange_tz: str, drops: _DropCounter):
    """Yield AssignedMessage records from a classified.csv, counting drops.

    Messages whose timestamp falls outside the calendar's assignable range
    are skipped (with the count surfaced in the detect summary).
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in CLASSIFIED_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise DataError(f"{path}: missing classified columns {missing}")
        for row in reader:
            try:
                ts = parse_timestamp(row["timestamp"] or "")
            except ValueError:
                raise DataError(f"{path}:{reader.line_num}: bad timestamp in classified file")
            idx = assign_trading_index(ts, calendar, exchange_tz)
            if idx is None:
                drops.count += 1
                continue
            names = (row["nodes"] or "").split("|")
            nodes = frozenset(parse_node(n) for n in names if n)
            score = float(row["score"] or 0.0)
            yield AssignedMessage(
                firm=(row["firm"] or "").strip(), day_index=idx, nodes=nodes, score=score
            )


def run_detect(cfg: RunConfig) -> DetectOutputs:
    """Turn classified messages into screened risk events."""
    classified = cfg.classified_path()
    if not classified.exists():
        raise ConfigError(f"classified file {classified} does not exist; run classify first")
    index_path = cfg.require_path("market_index")
    outdir = cfg.outdir()
    outdir.mkdir(parents=True, exist_ok=True)

    index_rows, _ = read_market_index(index_path)
    calendar = TradingCalendar.from_market_index(index_rows)

    confounds = []
    if cfg.paths.earnings:
        rows, _ = read_calendar_events(cfg.require_path("earnings"), EventKind.EARNINGS)
        confounds.extend(rows)
    if cfg.paths.controversy:
        rows, _ = read_calendar_events(cfg.require_path("controversy"), EventKind.CONTROVERSY)
        confounds.extend(rows)

    drops = _DropCounter()
    agg = build_series(_iter_classified(classified, calendar, cfg.exchange_tz, drops), calendar)
    detected: list[RiskEvent] = []
    for series in agg:
        outliers = esd_outliers(series.counts, cfg.detection)
        detected.extend(
            filter_and_merge(outliers, series, calendar, cfg.detection, cfg.sentiment_threshold)
        )
    detected.sort(key=lambda e: (e.firm, node_sort_key(e.node), e.day))

    unconfounded, removed = exclude_confounded(detected, confounds, calendar, cfg.detection)
    kept, positives = select_risk_events(unconfounded)

    removal_by_event = {id(rem.event): rem for rem in removed}
    events_path = cfg.events_path()
    with open(events_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(EVENT_COLUMNS)
        for event in detected:
            rem = removal_by_event.get(id(event))
            if rem is not None:
                kept_flag = "false"
                reason = f"confounded_{rem.kind.name.lower()}"
                distance = str(rem.distance)
            elif event.sign.value == "positive":
                kept_flag, reason, distance = "false", "positive_sign", ""
            else:
                kept_flag, reason, distance = "true", "", ""
            writer.writerow([
                event.firm,
                event.node.value,
                event.day.isoformat(),
                event.count,
                str(event.share),
                str(event.score),
                event.sign.value,
                kept_flag,
                reason,
                distance,
            ])

    (outdir / "event_counts.csv").write_text(render_event_counts_csv(kept), encoding="utf-8")
    (outdir / "removal_histogram.csv").write_text(
        render_removal_histogram_csv(removed, cfg.detection.exclusion_halfwidth),
        encoding="utf-8",
    )
    return DetectOutputs(
        events_path=events_path,
        calendar=calendar,
        detected=detected,
        kept=kept,
        positives=positives,
        removed=removed,
        dropped_messages=drops.count,
    )


def load_kept_events(path: str | Path) -> list[tuple[str, Node, date]]:
    """Read kept events from an events.csv."""
    out: list[tuple[str, Node, date]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in EVENT_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise DataError(f"{path}: missing event columns {missing}")
        for row in reader:
            if (row.get("kept") or "").strip() != "true":
                continue
            out.append(
                (
                    (row.get("firm") or "").strip(),
                    parse_node(row.get("node") or ""),
                    date.fromisoformat((row.get("date") or "").strip()),
                )
            )
    return out


# --- study stage -------------------------------------------------------------


@dataclass
class StudyOutputs:
    results: list[NodeStudyResult]
    drops: list[tuple[str, Node, date, str]]
    results_csv: Path
    results_text: Path
    robustness: "StudyOutputs | None" = None


def study_events(
    event_keys: Sequence[tuple[str, Node, date]],
    firm_returns: dict,
    market_returns,
    calendar: TradingCalendar,
    config: EstimationConfig,
) -> tuple[list[NodeStudyResult], list[tuple[str, Node, date, str]]]:
    """Compute per-node study results for (firm, node, date) events."""
    cache: dict[tuple[str, date], EventAbnormals | EventDropped] = {}
    by_node: dict[Node, list[EventAbnormals]] = {}
    drops: list[tuple[str, Node, date, str]] = []
    for firm, node, day in sorted(event_keys, key=lambda k: (k[0], node_sort_key(k[1]), k[2])):
        key = (firm, day)
        got = cache.get(key)
        if got is None:
            returns = firm_returns.get(firm)
            if returns is None:
                got = EventDropped("no price data for firm")
            else:
                try:
                    got = compute_event_abnormals(
                        returns, market_returns, calendar.index_of(day), config,
                        firm=firm, day=day,
                    )
                except EventDropped as exc:
                    got = exc
            cache[key] = got
        if isinstance(got, EventDropped):
            drops.append((firm, node, day, got.reason))
        else:
            by_node.setdefault(node, []).append(got)
    results = [
        aggregate_node(node, by_node[node], config)
        for node in REPORT_ORDER
        if node in by_node
    ]
    return results, drops


def run_study(cfg: RunConfig) -> StudyOutputs:
    """Run the event study on kept events and write the result files."""
    events_path = cfg.events_path()
    if not events_path.exists():
        raise ConfigError(f"events file {events_path} does not exist; run detect first")
    prices_path = cfg.require_path("prices")
    index_path = cfg.require_path("market_index")
    outdir = cfg.outdir()
    outdir.mkdir(parents=True, exist_ok=True)

    event_keys = load_kept_events(events_path)
    prices, _ = read_prices(prices_path)
    index_rows, _ = read_market_index(index_path)
    calendar = TradingCalendar.from_market_index(index_rows)
    firm_returns = align_firm_returns(prices, calendar)
    market_returns = align_market_returns(index_rows, calendar)

    outputs = _write_study_outputs(
        event_keys, firm_returns, market_returns, calendar, cfg.study, outdir, suffix=""
    )
    if cfg.robustness_est_len:
        robust_len = int(cfg.robustness_est_len)
        robust_cfg = dataclasses.replace(
            cfg.study,
            est_len=robust_len,
            min_obs=min(
                cfg.study.min_obs,
                max(3, round(robust_len * cfg.study.min_obs / cfg.study.est_len)),
            ),
        )
        robust_cfg.validate()
        outputs.robustness = _write_study_outputs(
            event_keys, firm_returns, market_returns, calendar, robust_cfg, outdir,
            suffix=f"_est{robust_len}",
        )
    return outputs


def _write_study_outputs(
    event_keys, firm_returns, market_returns, calendar, study_cfg, outdir: Path, suffix: str
) -> StudyOutputs:
    results, drops = study_events(event_keys, firm_returns, market_returns, calendar, study_cfg)
    results_csv = outdir / f"results{suffix}.csv"
    results_text = outdir / f"results{suffix}.txt"
    results_csv.write_text(render_results_csv(results, study_cfg), encoding="utf-8")
    results_text.write_text(render_results_text(results, study_cfg), encoding="utf-8")
    for res in results:
        curve_path = outdir / f"scaar_curve_{res.node.value}{suffix}.csv"
        curve_path.write_text(render_scaar_curve_csv(res), encoding="utf-8")
    drops_path = outdir / f"drops{suffix}.csv"
    with open(drops_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["firm", "node", "date", "reason"])
        for firm, node, day, reason in drops:
            writer.writerow([firm, node.value, day.isoformat(), reason])
    return StudyOutputs(
        results=results, drops=drops, results_csv=results_csv, results_text=results_text
    )


def run_pipeline(cfg: RunConfig) -> tuple[ClassifyOutputs, DetectOutputs, StudyOutputs]:
    classify_out = run_classify(cfg)
    detect_out = run_detect(cfg)
    study_out = run_study(cfg)
    return classify_out, detect_out, study_out
