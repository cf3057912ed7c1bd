"""smartsearch: line-oriented code search with automatic query alternatives.

When a query returns few or no results, the engine generates alternative
queries by rewriting the original (interpret as regex, drop quotes, split
terms, add a language filter), evaluates them against the remaining result
budget, and streams their matches alongside the originals with provenance.
"""

from .corpus import Corpus, Document, IngestConfig, IngestReport, ingest
from .evaluator import (
    ALERT_TITLE,
    NO_RESULTS,
    NOT_TRIGGERED,
    PARALLEL,
    SEQUENTIAL,
    SOME_RESULTS,
    CandidateSummary,
    EvalConfig,
    EvaluationOutcome,
    encode_event,
    evaluate,
    evaluate_parallel,
)
from .generator import DEFAULT_MAX_CANDIDATES, CandidateQuery, generate
from .matching import MatchRecord, Provenance, SearchStats, count_matches, search
from .querylang import (
    And,
    AtomKind,
    Filter,
    FilterNode,
    Node,
    Not,
    Or,
    ParseError,
    PatternAtom,
    Query,
    Sequence,
    count_metasyntax,
    is_valid_regex,
    parse,
    to_query_string,
)
from .rules import RULE_IDS, RULES, Rule, applicable, apply, describe
from .snapshot import SnapshotError, load, save
from .telemetry import (
    ClickEvent,
    ClickSource,
    EventLog,
    MetricsReport,
    SearchTelemetry,
    ValidationError,
    assign_variant,
    replay,
    report,
)

__version__ = "0.1.0"

__all__ = [
    "ALERT_TITLE",
    "And",
    "AtomKind",
    "CandidateQuery",
    "CandidateSummary",
    "ClickEvent",
    "ClickSource",
    "Corpus",
    "DEFAULT_MAX_CANDIDATES",
    "Document",
    "EvalConfig",
    "EvaluationOutcome",
    "EventLog",
    "Filter",
    "FilterNode",
    "IngestConfig",
    "IngestReport",
    "MatchRecord",
    "MetricsReport",
    "NO_RESULTS",
    "NOT_TRIGGERED",
    "Node",
    "Not",
    "Or",
    "PARALLEL",
    "ParseError",
    "PatternAtom",
    "Provenance",
    "Query",
    "RULES",
    "RULE_IDS",
    "Rule",
    "SEQUENTIAL",
    "SOME_RESULTS",
    "SearchStats",
    "SearchTelemetry",
    "Sequence",
    "SnapshotError",
    "ValidationError",
    "applicable",
    "apply",
    "assign_variant",
    "count_matches",
    "count_metasyntax",
    "describe",
    "encode_event",
    "evaluate",
    "evaluate_parallel",
    "generate",
    "ingest",
    "is_valid_regex",
    "load",
    "parse",
    "replay",
    "report",
    "save",
    "search",
    "to_query_string",
]
