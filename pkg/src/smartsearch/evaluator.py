"""Search evaluation with automatic alternative-query evaluation (atqe).

The original query streams first, up to the display limit. When it comes
back under the limit and at least one transformation rule applies, the
bounded candidate set is evaluated in rank order against the remaining
budget; duplicate matches are suppressed, an alert summarizes the
alternatives that actually found something, and a final done event carries
the evaluation outcome.

Events are plain dicts in wire shape; serialize them with
``encode_event`` for the NDJSON protocol. Parallel mode may overlap the
candidate searches but commits their events in rank order, so its event
stream is byte-identical to sequential mode.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import chain
from typing import Callable

from . import generator, matching, rules
from .corpus import Corpus
from .matching import MatchRecord, Provenance
from .querylang import ParseError, parse

SEQUENTIAL = "sequential"
PARALLEL = "parallel"

NOT_TRIGGERED = "not_triggered"
NO_RESULTS = "no_results"
SOME_RESULTS = "some_results"

ALERT_TITLE = "Smart Search"

EventSink = Callable[[dict], None]


@dataclass
class EvalConfig:
    display_limit: int = 500
    max_candidates: int = generator.DEFAULT_MAX_CANDIDATES
    atqe_enabled: bool = True
    mode: str = SEQUENTIAL

    def __post_init__(self) -> None:
        if self.display_limit < 0:
            raise ValueError("display_limit must be >= 0")
        if self.max_candidates < 0:
            raise ValueError("max_candidates must be >= 0")
        if self.mode not in (SEQUENTIAL, PARALLEL):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class CandidateSummary:
    rank: int
    applied_rules: tuple[str, ...]
    rendered: str
    description: str
    streamed_count: int
    limit_hit: bool


@dataclass
class EvaluationOutcome:
    original_count: int
    triggered: bool
    category: str
    candidates: list[CandidateSummary] = field(default_factory=list)
    total_streamed: int = 0


def match_event(record: MatchRecord) -> dict:
    source: dict = {"origin": record.source.origin}
    if record.source.origin == "candidate":
        source["rank"] = record.source.candidate_rank
        source["rules"] = list(record.source.applied_rules or ())
    return {
        "event": "match",
        "repo": record.repo,
        "path": record.path,
        "line": record.line_number,
        "start": record.start,
        "end": record.end,
        "text": record.line_text,
        "source": source,
    }


def alert_event(proposals: list[CandidateSummary]) -> dict:
    return {
        "event": "alert",
        "title": ALERT_TITLE,
        "proposals": [
            {
                "description": c.description,
                "query": c.rendered,
                "count": c.streamed_count,
                "limit_hit": c.limit_hit,
                "rules": list(c.applied_rules),
            }
            for c in proposals
        ],
    }


def error_event(code: str, message: str) -> dict:
    return {"event": "error", "code": code, "message": message}


def done_event(outcome: EvaluationOutcome) -> dict:
    return {
        "event": "done",
        "outcome": {
            "original_count": outcome.original_count,
            "triggered": outcome.triggered,
            "category": outcome.category,
            "candidates": [
                {
                    "rank": c.rank,
                    "applied_rules": list(c.applied_rules),
                    "rendered": c.rendered,
                    "description": c.description,
                    "streamed_count": c.streamed_count,
                    "limit_hit": c.limit_hit,
                }
                for c in outcome.candidates
            ],
            "total_streamed": outcome.total_streamed,
        },
    }


def encode_event(event: dict) -> bytes:
    """One NDJSON wire line, UTF-8, compact separators, trailing newline."""
    return (json.dumps(event, ensure_ascii=False, separators=(",", ":")) + "\n").encode(
        "utf-8"
    )


def evaluate(
    corpus: Corpus, query: str, config: EvalConfig, sink: EventSink
) -> EvaluationOutcome:
    """Run one search, streaming wire events into sink.

    Parse failures emit an error event and stop; internal failures emit an
    error event and re-raise.
    """
    try:
        ast = parse(query)
    except ParseError as exc:
        sink(error_event("parse", str(exc)))
        return EvaluationOutcome(0, False, NOT_TRIGGERED)
    try:
        if config.mode == PARALLEL:
            return _evaluate_parallel(corpus, ast, config, sink)
        return _evaluate_sequential(corpus, ast, config, sink)
    except Exception as exc:  # contract violation; surface on the stream too
        sink(error_event("internal", f"{type(exc).__name__}: {exc}"))
        raise


def evaluate_parallel(
    corpus: Corpus, query: str, config: EvalConfig, sink: EventSink
) -> EvaluationOutcome:
    cfg = EvalConfig(
        display_limit=config.display_limit,
        max_candidates=config.max_candidates,
        atqe_enabled=config.atqe_enabled,
        mode=PARALLEL,
    )
    return evaluate(corpus, query, cfg, sink)


class _Stream:
    """Shared emission state: duplicate suppression and the budget."""

    def __init__(self, sink: EventSink):
        self.sink = sink
        self.seen: set[tuple] = set()

    def emit(self, record: MatchRecord) -> bool:
        key = (record.repo, record.path, record.line_number, record.start, record.end)
        if key in self.seen:
            return False
        self.seen.add(key)
        self.sink(match_event(record))
        return True


def _provenance(cand: generator.CandidateQuery) -> Provenance:
    return Provenance("candidate", cand.rank, cand.applied_rules)


def _stream_original(
    corpus: Corpus, ast, config: EvalConfig, stream: _Stream
) -> int:
    stats = matching.search(
        corpus,
        ast,
        config.display_limit,
        lambda record: stream.emit(record),
    )
    return stats.emitted_count


def _candidates_if_triggered(
    ast, config: EvalConfig, original_count: int
):
    """Returns an iterator over candidates, or None when atqe does not trigger."""
    if not config.atqe_enabled or original_count >= config.display_limit:
        return None
    gen = generator.generate(ast, config.max_candidates)
    first = next(gen, None)
    if first is None:
        return None
    return chain([first], gen)


def _finish(
    outcome: EvaluationOutcome, stream: _Stream
) -> EvaluationOutcome:
    proposals = [c for c in outcome.candidates if c.streamed_count >= 1]
    if proposals:
        stream.sink(alert_event(proposals))
    stream.sink(done_event(outcome))
    return outcome


def _evaluate_sequential(
    corpus: Corpus, ast, config: EvalConfig, sink: EventSink
) -> EvaluationOutcome:
    stream = _Stream(sink)
    original_count = _stream_original(corpus, ast, config, stream)
    total = original_count
    candidates = _candidates_if_triggered(ast, config, original_count)
    if candidates is None:
        outcome = EvaluationOutcome(original_count, False, NOT_TRIGGERED, [], total)
        return _finish(outcome, stream)

    summaries: list[CandidateSummary] = []
    for cand in candidates:
        budget = config.display_limit - total
        if budget <= 0:
            break
        streamed = 0
        provenance = _provenance(cand)

        def forward(record: MatchRecord) -> None:
            nonlocal streamed
            if stream.emit(record):
                streamed += 1

        stats = matching.search(corpus, cand.ast, budget, forward, source=provenance)
        total += streamed
        summaries.append(
            CandidateSummary(
                rank=cand.rank,
                applied_rules=cand.applied_rules,
                rendered=cand.rendered,
                description=rules.describe(cand.applied_rules),
                streamed_count=streamed,
                limit_hit=stats.limit_hit,
            )
        )
    category = NO_RESULTS if original_count == 0 else SOME_RESULTS
    outcome = EvaluationOutcome(original_count, True, category, summaries, total)
    return _finish(outcome, stream)


def _evaluate_parallel(
    corpus: Corpus, ast, config: EvalConfig, sink: EventSink
) -> EvaluationOutcome:
    stream = _Stream(sink)
    original_count = _stream_original(corpus, ast, config, stream)
    total = original_count
    candidates = _candidates_if_triggered(ast, config, original_count)
    if candidates is None:
        outcome = EvaluationOutcome(original_count, False, NOT_TRIGGERED, [], total)
        return _finish(outcome, stream)

    cands = list(candidates)
    optimistic = config.display_limit - original_count

    def collect(cand: generator.CandidateQuery):
        records: list[MatchRecord] = []
        stats = matching.search(
            corpus, cand.ast, optimistic, records.append, source=_provenance(cand)
        )
        return records, stats

    summaries: list[CandidateSummary] = []
    with ThreadPoolExecutor(max_workers=min(8, max(1, len(cands)))) as pool:
        futures = [(cand, pool.submit(collect, cand)) for cand in cands]
        exhausted = False
        for cand, future in futures:
            budget = config.display_limit - total
            if exhausted or budget <= 0:
                exhausted = True
                future.cancel()  # best-effort; running searches are bounded anyway
                continue
            records, stats = future.result()
            raw = records[:budget]
            # limit_hit exactly as a sequential search with this budget would
            # have reported it: a further match existed beyond the budget
            if len(records) > budget:
                limit_hit = True
            elif len(records) == budget and budget == optimistic:
                limit_hit = stats.limit_hit
            else:
                limit_hit = False
            streamed = 0
            for record in raw:
                if stream.emit(record):
                    streamed += 1
            total += streamed
            summaries.append(
                CandidateSummary(
                    rank=cand.rank,
                    applied_rules=cand.applied_rules,
                    rendered=cand.rendered,
                    description=rules.describe(cand.applied_rules),
                    streamed_count=streamed,
                    limit_hit=limit_hit,
                )
            )
    category = NO_RESULTS if original_count == 0 else SOME_RESULTS
    outcome = EvaluationOutcome(original_count, True, category, summaries, total)
    return _finish(outcome, stream)
