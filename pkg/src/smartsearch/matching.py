"""Line-oriented search over a Corpus.

Semantics, per query node evaluated against one document:

  * Sequence: its atoms compile to a single per-line regex. Literal atoms
    contribute escaped text (quoted atoms including their quotes), regex
    atoms contribute their pattern, all joined by single literal spaces. A
    pure-literal sequence therefore matches exactly where the space-joined
    literal occurs in a line; a lone regex atom matches as that regex.
  * FilterNode: repo/path match by case-sensitive substring, lang by equality
    after alias resolution (unresolvable values match nothing), content when
    any line contains the value. Standing alone, a filter yields every
    non-empty line of passing documents (empty lines cannot carry a span).
  * And: file scope. Filter and Not children restrict which documents
    qualify; every other child must match somewhere in the document, and all
    of those children's matches are emitted. With no pattern children the
    qualifying documents contribute all their non-empty lines.
  * Or: union of children's matches, deduplicated by (line, span).
  * Not: excludes documents where the child matches; contributes no lines of
    its own (a bare NOT query emits nothing rather than dumping the corpus).

Matches stream in (doc id, line_number, start) order; offsets are byte
offsets into the UTF-8 encoding of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional

from . import languages
from .corpus import Corpus, Document
from .querylang import (
    And,
    AtomKind,
    Filter,
    FilterNode,
    Node,
    Not,
    Or,
    Query,
    Sequence,
)


@dataclass(frozen=True)
class Provenance:
    origin: str  # "original" | "candidate"
    candidate_rank: Optional[int] = None
    applied_rules: Optional[tuple[str, ...]] = None


ORIGINAL = Provenance("original")


@dataclass(frozen=True)
class MatchRecord:
    repo: str
    path: str
    line_number: int  # 1-based
    start: int  # byte offset into the UTF-8 line, half-open
    end: int
    line_text: str
    source: Provenance = ORIGINAL


@dataclass
class SearchStats:
    emitted_count: int
    limit_hit: bool


Sink = Callable[[MatchRecord], None]

Span = tuple[int, int, int]  # (line index 0-based, start char, end char)


class _Matcher:
    """Per-search compiled state: one regex per distinct Sequence node."""

    def __init__(self) -> None:
        self._patterns: dict[Sequence, re.Pattern[str]] = {}

    def pattern_for(self, seq: Sequence) -> re.Pattern[str]:
        pat = self._patterns.get(seq)
        if pat is None:
            # regex atoms were subset-validated at parse time; the composed
            # pattern only adds escaped literals and (?: ) wrappers
            pat = re.compile(sequence_pattern(seq))
            self._patterns[seq] = pat
        return pat

    def sequence_spans(self, seq: Sequence, doc: Document) -> set[Span]:
        pat = self.pattern_for(seq)
        spans: set[Span] = set()
        for idx, line in enumerate(doc.lines):
            for m in pat.finditer(line):
                if m.start() == m.end():
                    continue  # zero-width matches have no span
                spans.add((idx, m.start(), m.end()))
        return spans


_NEEDS_ESCAPE = frozenset(".*+?|()[]{}^$\\")


def _escape_literal(text: str) -> str:
    # narrower than re.escape: leaves spaces/hyphens/etc alone so the result
    # stays inside the supported regex subset
    return "".join("\\" + c if c in _NEEDS_ESCAPE else c for c in text)


def sequence_pattern(seq: Sequence) -> str:
    parts: list[str] = []
    for atom in seq.atoms:
        if atom.kind is AtomKind.REGEX:
            parts.append(f"(?:{atom.text})")
        else:
            text = f'"{atom.text}"' if atom.quoted else atom.text
            parts.append(_escape_literal(text))
    return " ".join(parts)


def filter_passes(f: Filter, doc: Document) -> bool:
    if f.field == "repo":
        ok = f.value in doc.repo
    elif f.field == "path":
        ok = f.value in doc.path
    elif f.field == "lang":
        resolved = languages.resolve_alias(f.value)
        ok = resolved is not None and resolved == doc.language
    elif f.field == "content":
        ok = any(f.value in line for line in doc.lines)
    else:
        raise ValueError(f"unknown filter field {f.field!r}")
    return not ok if f.negated else ok


def _all_line_spans(doc: Document) -> set[Span]:
    return {(i, 0, len(line)) for i, line in enumerate(doc.lines) if line}


def _doc_eval(node: Node, doc: Document, matcher: _Matcher) -> tuple[bool, set[Span]]:
    """(qualifies, spans) for one document."""
    if isinstance(node, Sequence):
        spans = matcher.sequence_spans(node, doc)
        return bool(spans), spans
    if isinstance(node, FilterNode):
        if filter_passes(node.filter, doc):
            return True, _all_line_spans(doc)
        return False, set()
    if isinstance(node, Not):
        child_ok, _ = _doc_eval(node.child, doc, matcher)
        return not child_ok, set()
    if isinstance(node, Or):
        qualifies = False
        spans: set[Span] = set()
        for child in node.children:
            ok, child_spans = _doc_eval(child, doc, matcher)
            if ok:
                qualifies = True
                spans |= child_spans
        return qualifies, spans
    if isinstance(node, And):
        pattern_spans: set[Span] = set()
        has_pattern_child = False
        for child in node.children:
            if isinstance(child, FilterNode):
                if not filter_passes(child.filter, doc):
                    return False, set()
            elif isinstance(child, Not):
                ok, _ = _doc_eval(child, doc, matcher)
                if not ok:
                    return False, set()
            else:
                has_pattern_child = True
                ok, child_spans = _doc_eval(child, doc, matcher)
                if not ok:
                    return False, set()
                pattern_spans |= child_spans
        if has_pattern_child:
            return True, pattern_spans
        return True, _all_line_spans(doc)
    raise TypeError(f"not a query node: {node!r}")


def _byte_span(line: str, start: int, end: int) -> tuple[int, int]:
    if line.isascii():
        return start, end
    prefix = len(line[:start].encode("utf-8"))
    inner = len(line[start:end].encode("utf-8"))
    return prefix, prefix + inner


def search(
    corpus: Corpus,
    q: Query,
    limit: int,
    sink: Sink,
    source: Provenance = ORIGINAL,
) -> SearchStats:
    """Stream matches for q into sink, stopping after `limit` records.

    limit_hit is True exactly when at least one further match existed beyond
    the limit. An empty query (None) matches nothing.
    """
    if q is None:
        return SearchStats(0, False)
    limit = max(0, limit)
    matcher = _Matcher()
    if corpus.trigram_index is not None:
        candidates = sorted(prefilter_candidates(corpus, q))
    else:
        candidates = list(corpus.all_ids())
    emitted = 0
    for doc_id in candidates:
        doc = corpus.documents[doc_id]
        qualifies, spans = _doc_eval(q, doc, matcher)
        if not qualifies or not spans:
            continue
        for line_idx, start, end in sorted(spans):
            if emitted >= limit:
                return SearchStats(emitted, True)
            line = doc.lines[line_idx]
            bstart, bend = _byte_span(line, start, end)
            sink(
                MatchRecord(
                    repo=doc.repo,
                    path=doc.path,
                    line_number=line_idx + 1,
                    start=bstart,
                    end=bend,
                    line_text=line,
                    source=source,
                )
            )
            emitted += 1
    return SearchStats(emitted, False)


def count_matches(corpus: Corpus, q: Query, limit: int) -> SearchStats:
    return search(corpus, q, limit, lambda _record: None)


# --------------------------------------------------------------------------
# trigram prefilter

# internal algebra uses None as "all documents"
_DocSet = Optional[frozenset[int]]


def prefilter_candidates(corpus: Corpus, q: Query) -> set[int]:
    """A superset of the documents containing matches for q's pattern leaves.

    Literal text contributes required trigrams whose posting sets intersect;
    regexes contribute trigrams of their mandatory literal runs where
    derivable; boolean structure combines with union/intersection; Not
    children and non-content filters contribute all documents. Text shorter
    than 3 bytes cannot constrain anything.
    """
    if corpus.trigram_index is None:
        raise ValueError("corpus has no trigram index")
    if q is None:
        return set()
    result = _prefilter_node(q, corpus.trigram_index)
    if result is None:
        return set(corpus.all_ids())
    return set(result)


def _postings_for_literal(text: str, index: dict[bytes, frozenset[int]]) -> _DocSet:
    data = text.encode("utf-8")
    if len(data) < 3:
        return None
    result: _DocSet = None
    for i in range(len(data) - 2):
        posting = index.get(data[i : i + 3], frozenset())
        result = posting if result is None else result & posting
        if not result:
            return frozenset()
    return result


def _intersect(a: _DocSet, b: _DocSet) -> _DocSet:
    if a is None:
        return b
    if b is None:
        return a
    return a & b


def _union(a: _DocSet, b: _DocSet) -> _DocSet:
    if a is None or b is None:
        return None
    return a | b


def _prefilter_node(node: Node, index: dict[bytes, frozenset[int]]) -> _DocSet:
    if isinstance(node, Sequence):
        if all(a.kind is AtomKind.LITERAL for a in node.atoms):
            return _postings_for_literal(sequence_literal_text(node), index)
        result: _DocSet = None
        for atom in node.atoms:
            if atom.kind is AtomKind.LITERAL:
                text = f'"{atom.text}"' if atom.quoted else atom.text
                result = _intersect(result, _postings_for_literal(text, index))
            else:
                for run in regex_required_literals(atom.text):
                    result = _intersect(result, _postings_for_literal(run, index))
        return result
    if isinstance(node, FilterNode):
        if node.filter.field == "content" and not node.filter.negated:
            return _postings_for_literal(node.filter.value, index)
        return None
    if isinstance(node, Not):
        return None
    if isinstance(node, And):
        result = None
        for child in node.children:
            result = _intersect(result, _prefilter_node(child, index))
        return result
    if isinstance(node, Or):
        result: _DocSet = frozenset()
        for child in node.children:
            result = _union(result, _prefilter_node(child, index))
        return result
    raise TypeError(f"not a query node: {node!r}")


def sequence_literal_text(seq: Sequence) -> str:
    return " ".join(
        f'"{a.text}"' if a.quoted else a.text
        for a in seq.atoms
        if a.kind is AtomKind.LITERAL
    )


def regex_required_literals(pattern: str) -> list[str]:
    """Mandatory literal runs of a subset regex, conservatively.

    Only depth-0 plain characters that cannot be skipped by a quantifier are
    kept; groups, classes, wildcards, anchors and class escapes break runs;
    a top-level alternation means nothing is mandatory. Every returned string
    must appear in any line the regex matches.
    """
    runs: list[str] = []
    cur: list[str] = []
    i = 0
    n = len(pattern)

    def flush() -> None:
        if cur:
            runs.append("".join(cur))
            cur.clear()

    def skip_quantifier(j: int) -> tuple[int, Optional[str]]:
        """Return (next index, quantifier kind) where kind in {min0, min1, None}."""
        if j >= n:
            return j, None
        c = pattern[j]
        if c in "*?":
            j += 1
            if j < n and pattern[j] == "?":
                j += 1
            return j, "min0"
        if c == "+":
            j += 1
            if j < n and pattern[j] == "?":
                j += 1
            return j, "min1"
        if c == "{":
            m = re.match(r"\{(\d+)(?:,\d*)?\}\??", pattern[j:])
            if m:
                return j + m.end(), ("min0" if int(m.group(1)) == 0 else "min1")
        return j, None

    while i < n:
        c = pattern[i]
        if c == "\\":
            nxt = pattern[i + 1] if i + 1 < n else ""
            i += 2
            if nxt in "wsdb" or not nxt:
                flush()
                continue
            i, kind = skip_quantifier(i)
            if kind == "min0":
                flush()
            elif kind == "min1":
                cur.append(nxt)
                flush()
            else:
                cur.append(nxt)
        elif c == "(":
            flush()
            depth = 1
            i += 1
            while i < n and depth:
                if pattern[i] == "\\":
                    i += 2
                    continue
                if pattern[i] == "[":
                    _, i = _skip_class(pattern, i)
                    continue
                if pattern[i] == "(":
                    depth += 1
                elif pattern[i] == ")":
                    depth -= 1
                i += 1
            i, _ = skip_quantifier(i)
        elif c == "[":
            flush()
            _, i = _skip_class(pattern, i)
            i, _ = skip_quantifier(i)
        elif c == "|":
            return []  # top-level alternation: nothing is mandatory
        elif c in ".^$":
            flush()
            i += 1
            i, _ = skip_quantifier(i)
        elif c in "*+?{":
            # quantifier directly after a literal character
            i, kind = skip_quantifier(i)
            if kind is None:
                # stray '{' that is not a repetition: literal
                cur.append(c)
                i += 1
            elif kind == "min0":
                if cur:
                    cur.pop()
                flush()
            else:
                flush()
        else:
            cur.append(c)
            i += 1
    flush()
    return [r for r in runs if r]


def _skip_class(pattern: str, i: int) -> tuple[None, int]:
    n = len(pattern)
    i += 1
    if i < n and pattern[i] == "^":
        i += 1
    while i < n and pattern[i] != "]":
        if pattern[i] == "\\":
            i += 2
        else:
            i += 1
    return None, i + 1 if i < n else i
