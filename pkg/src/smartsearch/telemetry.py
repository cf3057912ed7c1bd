"""Telemetry: variant assignment, event logging, metrics, replay.

Search and click events append to an NDJSON log (same encoding discipline as
the wire protocol). Variant assignment hashes the session id with FNV-1a 64
plus an avalanche finalizer; the raw FNV low bit is parity-biased, the mixed
one splits 50/50. Replay re-runs a query log deterministically: record
timestamps are the line index, so identical inputs produce byte-identical
logs and reports.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Optional, Union

from . import evaluator, rules
from .corpus import Corpus
from .evaluator import EvalConfig

CONTROL = "control"
ATQE = "atqe"
VARIANTS = (CONTROL, ATQE)

CATEGORIES = (evaluator.NOT_TRIGGERED, evaluator.NO_RESULTS, evaluator.SOME_RESULTS)

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


class ValidationError(ValueError):
    pass


def _mix64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & _MASK64
    h ^= h >> 33
    h = (h * 0xFF51AFD7ED558CCD) & _MASK64
    h ^= h >> 33
    return h


def assign_variant(session_id: str) -> str:
    """Deterministic 50/50 assignment, stable across processes and runs."""
    return ATQE if _mix64(session_id.encode("utf-8")) & 1 else CONTROL


# --------------------------------------------------------------------------
# events

@dataclass(frozen=True)
class SearchTelemetry:
    session_id: str
    timestamp: int  # ms since epoch, or the record index during replay
    variant: str
    query: str
    triggered: bool
    category: str
    candidate_rules: tuple[tuple[tuple[str, ...], int], ...]
    total_streamed: int

    def to_record(self) -> dict:
        return {
            "type": "search",
            "session_id": self.session_id,
            "timestamp": self.timestamp,
            "variant": self.variant,
            "query": self.query,
            "triggered": self.triggered,
            "category": self.category,
            "candidate_rules": [
                {"applied_rules": list(applied), "streamed_count": count}
                for applied, count in self.candidate_rules
            ],
            "total_streamed": self.total_streamed,
        }


@dataclass(frozen=True)
class ClickSource:
    origin: str  # "original" | "candidate"
    rank: Optional[int] = None
    rules: Optional[tuple[str, ...]] = None


@dataclass(frozen=True)
class ClickEvent:
    session_id: str
    timestamp: int
    source: ClickSource
    category_at_search: str

    def to_record(self) -> dict:
        source: dict = {"origin": self.source.origin}
        if self.source.origin == "candidate":
            source["rank"] = self.source.rank
            source["rules"] = list(self.source.rules or ())
        return {
            "type": "click",
            "session_id": self.session_id,
            "timestamp": self.timestamp,
            "source": source,
            "category_at_search": self.category_at_search,
        }


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


def validate_search_record(rec: dict) -> None:
    _require(isinstance(rec.get("session_id"), str) and rec["session_id"] != "", "search record needs a session_id")
    _require(isinstance(rec.get("timestamp"), int), "search record needs an integer timestamp")
    _require(rec.get("variant") in VARIANTS, f"variant must be one of {VARIANTS}")
    _require(isinstance(rec.get("query"), str), "search record needs a query string")
    _require(isinstance(rec.get("triggered"), bool), "triggered must be a bool")
    _require(rec.get("category") in CATEGORIES, f"category must be one of {CATEGORIES}")
    triggered = rec["triggered"]
    _require(
        (rec["category"] == evaluator.NOT_TRIGGERED) == (not triggered),
        "category must be not_triggered exactly when triggered is false",
    )
    cr = rec.get("candidate_rules")
    _require(isinstance(cr, list), "candidate_rules must be a list")
    for entry in cr:
        _require(
            isinstance(entry, dict)
            and isinstance(entry.get("applied_rules"), list)
            and entry["applied_rules"] != []
            and isinstance(entry.get("streamed_count"), int)
            and entry["streamed_count"] >= 0,
            "candidate_rules entries need applied_rules and streamed_count",
        )
    _require(not (not triggered and cr), "untriggered searches cannot have candidates")
    _require(
        isinstance(rec.get("total_streamed"), int) and rec["total_streamed"] >= 0,
        "total_streamed must be a non-negative integer",
    )


def validate_click_record(rec: dict) -> None:
    _require(isinstance(rec.get("session_id"), str) and rec["session_id"] != "", "click record needs a session_id")
    _require(isinstance(rec.get("timestamp"), int), "click record needs an integer timestamp")
    source = rec.get("source")
    _require(isinstance(source, dict), "click record needs a source object")
    origin = source.get("origin")
    _require(origin in ("original", "candidate"), "click source origin must be original or candidate")
    if origin == "candidate":
        _require(
            isinstance(source.get("rank"), int) and source["rank"] >= 1,
            "candidate clicks need a rank >= 1",
        )
        rules_list = source.get("rules")
        _require(
            isinstance(rules_list, list) and len(rules_list) >= 1,
            "candidate clicks need a non-empty rules list",
        )
    else:
        _require(
            "rank" not in source and "rules" not in source,
            "original clicks cannot carry rank or rules",
        )
    _require(
        rec.get("category_at_search") in CATEGORIES,
        f"category_at_search must be one of {CATEGORIES}",
    )


def validate_record(rec: dict) -> None:
    kind = rec.get("type")
    if kind == "search":
        validate_search_record(rec)
    elif kind == "click":
        validate_click_record(rec)
    else:
        raise ValidationError(f"unknown record type {kind!r}")


# --------------------------------------------------------------------------
# append-only store

class EventLog:
    """Append-only NDJSON file with single-writer discipline per instance."""

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()

    def append(self, record: dict) -> None:
        validate_record(record)
        line = json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n"
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()

    def __iter__(self) -> Iterator[str]:
        if not os.path.exists(self.path):
            return iter(())
        with open(self.path, "r", encoding="utf-8") as fh:
            return iter(fh.read().splitlines())


def record(store: EventLog, event: Union[SearchTelemetry, ClickEvent, dict]) -> None:
    """Validate and append one event; malformed events raise ValidationError."""
    rec = event.to_record() if not isinstance(event, dict) else event
    store.append(rec)


# --------------------------------------------------------------------------
# metrics

@dataclass
class MetricsReport:
    trigger_rate_by_search: float
    trigger_rate_by_session: float
    category_split: dict[str, float]
    rule_click_breakdown: dict[str, dict[str, int]]
    clicked_any_by_session: dict[str, float]
    searches_with_results_rate: dict[str, float]
    diagnostics: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "trigger_rate_by_search": self.trigger_rate_by_search,
            "trigger_rate_by_session": self.trigger_rate_by_session,
            "category_split": self.category_split,
            "rule_click_breakdown": self.rule_click_breakdown,
            "clicked_any_by_session": self.clicked_any_by_session,
            "searches_with_results_rate": self.searches_with_results_rate,
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _rule_label(rule_ids: list[str]) -> str:
    if len(rule_ids) >= 2:
        return "composite"
    if len(rule_ids) == 1 and rule_ids[0] in rules.RULE_IDS:
        return rule_ids[0]
    return "other"


def _parse_source(source: Union[str, EventLog, Iterable]) -> tuple[list[dict], int]:
    if isinstance(source, EventLog):
        lines: Iterable = iter(source)
    elif isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = source
    records: list[dict] = []
    malformed = 0
    for item in lines:
        if isinstance(item, dict):
            rec = item
        else:
            text = item.strip()
            if not text:
                continue
            try:
                rec = json.loads(text)
            except json.JSONDecodeError:
                malformed += 1
                continue
        try:
            validate_record(rec)
        except ValidationError:
            malformed += 1
            continue
        records.append(rec)
    return records, malformed


def report(source: Union[str, EventLog, Iterable]) -> MetricsReport:
    """Aggregate an event log (path, EventLog, or record iterable).

    Malformed lines are skipped and counted under diagnostics. All rates are
    0.0 when their denominator is empty.
    """
    records, malformed = _parse_source(source)
    searches = [r for r in records if r["type"] == "search"]
    clicks = [r for r in records if r["type"] == "click"]

    def rate(num: int, denom: int) -> float:
        return num / denom if denom else 0.0

    triggered = [r for r in searches if r["triggered"]]
    sessions: dict[str, list[dict]] = {}
    for r in searches:
        sessions.setdefault(r["session_id"], []).append(r)
    sessions_triggered = sum(
        1 for recs in sessions.values() if any(r["triggered"] for r in recs)
    )

    category_split = {
        evaluator.NO_RESULTS: rate(
            sum(1 for r in triggered if r["category"] == evaluator.NO_RESULTS),
            len(triggered),
        ),
        evaluator.SOME_RESULTS: rate(
            sum(1 for r in triggered if r["category"] == evaluator.SOME_RESULTS),
            len(triggered),
        ),
    }

    breakdown: dict[str, dict[str, int]] = {}
    for c in clicks:
        if c["source"]["origin"] != "candidate":
            continue
        category = c["category_at_search"]
        if category == evaluator.NOT_TRIGGERED:
            continue
        label = _rule_label(c["source"].get("rules", []))
        bucket = breakdown.setdefault(
            label, {evaluator.NO_RESULTS: 0, evaluator.SOME_RESULTS: 0}
        )
        bucket[category] += 1

    by_variant_sessions: dict[str, set[str]] = {CONTROL: set(), ATQE: set()}
    for sid in sessions:
        by_variant_sessions[assign_variant(sid)].add(sid)
    clicked_sessions = {c["session_id"] for c in clicks}
    clicked_any_by_session = {
        variant: rate(
            sum(1 for sid in sids if sid in clicked_sessions), len(sids)
        )
        for variant, sids in by_variant_sessions.items()
    }

    searches_with_results_rate = {}
    for variant in VARIANTS:
        subset = [r for r in searches if r["variant"] == variant]
        searches_with_results_rate[variant] = rate(
            sum(1 for r in subset if r["total_streamed"] >= 1), len(subset)
        )

    return MetricsReport(
        trigger_rate_by_search=rate(len(triggered), len(searches)),
        trigger_rate_by_session=rate(sessions_triggered, len(sessions)),
        category_split=category_split,
        rule_click_breakdown=breakdown,
        clicked_any_by_session=clicked_any_by_session,
        searches_with_results_rate=searches_with_results_rate,
        diagnostics={
            "searches": len(searches),
            "clicks": len(clicks),
            "sessions": len(sessions),
            "malformed_lines": malformed,
        },
    )


# --------------------------------------------------------------------------
# replay

def iter_query_records(source: Union[str, Iterable]) -> Iterator[dict]:
    """Yield {"session_id", "query"} dicts from an NDJSON file or iterable."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = source
    for line in lines:
        if isinstance(line, dict):
            yield line
            continue
        text = line.strip()
        if not text:
            continue
        yield json.loads(text)


def replay(
    corpus: Corpus,
    queries: Union[str, Iterable],
    config: Optional[EvalConfig] = None,
    store: Optional[EventLog] = None,
) -> tuple[MetricsReport, list[SearchTelemetry]]:
    """Re-run a query log under deterministic variant assignment.

    Each query runs with atqe enabled only for sessions assigned the atqe
    variant (and only if the config enables atqe globally). Timestamps are
    record indices, so two replays of the same inputs agree byte for byte.
    """
    config = config or EvalConfig()
    discard = lambda event: None
    telemetry: list[SearchTelemetry] = []
    for index, entry in enumerate(iter_query_records(queries)):
        session_id = entry["session_id"]
        query = entry["query"]
        variant = assign_variant(session_id)
        run_config = replace(config, atqe_enabled=config.atqe_enabled and variant == ATQE)
        outcome = evaluator.evaluate(corpus, query, run_config, discard)
        event = SearchTelemetry(
            session_id=session_id,
            timestamp=index,
            variant=variant,
            query=query,
            triggered=outcome.triggered,
            category=outcome.category,
            candidate_rules=tuple(
                (c.applied_rules, c.streamed_count) for c in outcome.candidates
            ),
            total_streamed=outcome.total_streamed,
        )
        telemetry.append(event)
        if store is not None:
            record(store, event)
    return report(e.to_record() for e in telemetry), telemetry
