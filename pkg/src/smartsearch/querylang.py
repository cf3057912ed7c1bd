"""Query language: AST types, parser, canonical printer.

The surface syntax is a small code-search language:

  * whitespace-separated bare words form a single pattern Sequence whose
    atoms match as one space-joined literal per line
  * ``"..."`` is a quoted literal atom (matched *including* the quotes)
  * ``/.../`` is a regex atom, restricted to a validated subset
  * ``field:value`` filters (repo, path, lang, content); ``language:`` is
    accepted as an alias for ``lang:`` and canonicalized at parse time
  * uppercase AND / OR / NOT are operators; lowercase forms are literals
  * parentheses group

Canonical AST form: And children are ordered filters-first. The parser
normalizes to that form and ``to_query_string`` renders it, so
``parse(to_query_string(q)) == q`` for every canonical tree (``validate``
enforces the form for hand-built trees).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Union


class ParseError(ValueError):
    """Raised for any query the grammar rejects; the message names the construct."""


class AtomKind(str, Enum):
    LITERAL = "literal"
    REGEX = "regex"


FILTER_FIELDS = ("repo", "path", "lang", "content")

# parse-time field aliases, canonicalized in the AST
_FIELD_ALIASES = {"language": "lang"}

_OPERATORS = frozenset({"AND", "OR", "NOT"})


@dataclass(frozen=True)
class PatternAtom:
    text: str
    kind: AtomKind = AtomKind.LITERAL
    quoted: bool = False


@dataclass(frozen=True)
class Filter:
    field: str
    value: str
    negated: bool = False


@dataclass(frozen=True)
class Sequence:
    atoms: tuple[PatternAtom, ...]


@dataclass(frozen=True)
class FilterNode:
    filter: Filter


@dataclass(frozen=True)
class And:
    children: tuple["Node", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["Node", ...]


@dataclass(frozen=True)
class Not:
    child: "Node"


Node = Union[Sequence, FilterNode, And, Or, Not]

# An empty query parses to None: it matches nothing on its own.
Query = Optional[Node]


# --------------------------------------------------------------------------
# metasyntax counting (regex-likelihood heuristic)

_METACHARS = frozenset(".*+?|()[]{}^$")
_CLASS_ESCAPES = frozenset("wsdb")


def count_metasyntax(text: str) -> int:
    """Count regex operators in a literal string.

    Unescaped metacharacters count one each; class escapes (\\w \\s \\d \\b)
    count one for the pair; any other backslash pair (escaped metachar,
    escaped backslash) counts zero.
    """
    count = 0
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\\":
            if i + 1 < n and text[i + 1] in _CLASS_ESCAPES:
                count += 1
            i += 2
        else:
            if c in _METACHARS:
                count += 1
            i += 1
    return count


# --------------------------------------------------------------------------
# regex subset validation

_QUANTIFIER_START = frozenset("*+?{")


def regex_subset_error(pattern: str) -> Optional[str]:
    """Check a pattern against the supported regex subset.

    Allowed: literals, ``.``, ``*`` ``+`` ``?`` (with lazy ``?`` suffix),
    ``{m}`` ``{m,}`` ``{m,n}``, alternation, plain groups, character classes,
    anchors ``^`` ``$``, and escapes ``\\w \\s \\d \\b \\\\`` plus escaped
    metacharacters. Returns a message naming the offending construct, or
    None when the pattern is acceptable.
    """
    n = len(pattern)
    i = 0
    depth = 0
    quantifiable = False
    while i < n:
        c = pattern[i]
        if c == "\\":
            if i + 1 >= n:
                return "trailing backslash"
            nxt = pattern[i + 1]
            if nxt in _CLASS_ESCAPES:
                # \b is a zero-width assertion: not a quantifier target
                quantifiable = nxt != "b"
            elif nxt == "\\" or nxt == "/" or nxt in _METACHARS:
                quantifiable = True
            else:
                return f"unsupported escape '\\{nxt}'"
            i += 2
        elif c == "[":
            err, i = _scan_class(pattern, i)
            if err:
                return err
            quantifiable = True
        elif c == "(":
            if pattern[i + 1 : i + 2] == "?":
                return "unsupported group syntax '(?'"
            depth += 1
            quantifiable = False
            i += 1
        elif c == ")":
            if depth == 0:
                return "unmatched ')'"
            depth -= 1
            quantifiable = True
            i += 1
        elif c in "*+?":
            if not quantifiable:
                return f"nothing to repeat before '{c}'"
            i += 1
            if i < n and pattern[i] == "?":  # lazy modifier
                i += 1
            quantifiable = False
        elif c == "{":
            if not quantifiable:
                return "nothing to repeat before '{'"
            err, i = _scan_repetition(pattern, i)
            if err:
                return err
            if i < n and pattern[i] == "?":
                i += 1
            quantifiable = False
        elif c == "|":
            quantifiable = False
            i += 1
        elif c in "^$":
            quantifiable = False
            i += 1
        else:
            quantifiable = True
            i += 1
    if depth > 0:
        return "unclosed group"
    return None


def _scan_class(pattern: str, i: int) -> tuple[Optional[str], int]:
    """Scan a character class starting at ``pattern[i] == '['``.

    A ``-`` directly after an item and not directly before ``]`` starts a
    range; both endpoints must be single characters, so ``\\w \\s \\d`` on
    either side is an error. Elsewhere (class start, or right after a
    completed range) ``-`` is a literal.
    """
    n = len(pattern)
    i += 1
    if i < n and pattern[i] == "^":
        i += 1
    items = 0
    last_literal: Optional[str] = None  # most recent item usable as a range start
    last_was_class_escape = False  # \w, \s, \d cannot bound a range
    while i < n and pattern[i] != "]":
        c = pattern[i]
        if c == "\\":
            if i + 1 >= n:
                return "trailing backslash in character class", i
            nxt = pattern[i + 1]
            if nxt == "b":
                return "escape '\\b' is not supported inside a character class", i
            if nxt in "wsd":
                last_literal = None
                last_was_class_escape = True
            elif nxt in "\\]-[^/" or nxt in _METACHARS:
                last_literal = nxt
                last_was_class_escape = False
            else:
                return f"unsupported escape '\\{nxt}' in character class", i
            i += 2
            items += 1
        elif (
            c == "-"
            and i + 1 < n
            and pattern[i + 1] != "]"
            and (last_literal is not None or last_was_class_escape)
        ):
            if last_was_class_escape:
                return "bad character range: '\\w', '\\s', '\\d' cannot start a range", i
            lo = last_literal
            assert lo is not None
            hi = pattern[i + 1]
            width = 2
            if hi == "\\":
                if i + 2 >= n:
                    return "trailing backslash in character class", i
                esc = pattern[i + 2]
                if esc in "wsdb":
                    return f"bad character range {lo}-\\{esc}", i
                if not (esc in "\\]-[^/" or esc in _METACHARS):
                    return f"unsupported escape '\\{esc}' in character class", i
                hi = esc
                width = 3
            if ord(hi) < ord(lo):
                return f"bad character range {lo}-{hi}", i
            last_literal = None
            last_was_class_escape = False
            i += width
            items += 1
        else:
            last_literal = c
            last_was_class_escape = False
            i += 1
            items += 1
    if i >= n:
        return "unclosed character class", i
    if items == 0:
        return "empty character class", i
    return None, i + 1


def _scan_repetition(pattern: str, i: int) -> tuple[Optional[str], int]:
    """Scan ``{m}``, ``{m,}`` or ``{m,n}`` starting at ``pattern[i] == '{'``."""
    m = re.match(r"\{(\d+)(?:,(\d*))?\}", pattern[i:])
    if not m:
        return "invalid repetition syntax after '{'", i
    lo = int(m.group(1))
    if m.group(2):
        if int(m.group(2)) < lo:
            return f"invalid repetition range {{{m.group(1)},{m.group(2)}}}", i
    return None, i + m.end()


def compile_regex(pattern: str) -> re.Pattern[str]:
    """Compile a subset-validated pattern, raising ParseError otherwise."""
    err = regex_subset_error(pattern)
    if err is None:
        try:
            return re.compile(pattern)
        except re.error as exc:  # defensive: subset scan should have caught it
            err = str(exc)
    raise ParseError(f"invalid regex /{pattern}/: {err}")


def is_valid_regex(pattern: str) -> bool:
    if regex_subset_error(pattern) is not None:
        return False
    try:
        re.compile(pattern)
    except re.error:
        return False
    return True


# --------------------------------------------------------------------------
# tokenizer

_LP = "("
_RP = ")"


@dataclass(frozen=True)
class _Token:
    kind: str  # "lp" | "rp" | "op" | "atom" | "filter"
    value: object
    pos: int


_PAREN_HINT = "'(' and ')' group subqueries; a literal paren may need to be escaped in a /regex\\(/ atom"


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c == _LP:
            tokens.append(_Token("lp", c, i))
            i += 1
        elif c == _RP:
            tokens.append(_Token("rp", c, i))
            i += 1
        elif c == '"':
            value, i = _scan_quoted(text, i, "quoted pattern")
            tokens.append(_Token("atom", PatternAtom(value, AtomKind.LITERAL, quoted=True), i))
        elif c == "/":
            start = i
            value, i = _scan_regex(text, i)
            err = regex_subset_error(value)
            if err is not None:
                raise ParseError(f"invalid regex /{value}/: {err}")
            tokens.append(_Token("atom", PatternAtom(value, AtomKind.REGEX), start))
        else:
            token, i = _scan_word(text, i)
            tokens.append(token)
    return tokens


def _scan_quoted(text: str, i: int, construct: str) -> tuple[str, int]:
    """Scan a double-quoted string starting at ``text[i] == '"'``.

    Supports \\" and \\\\ escapes; returns the unescaped content.
    """
    out: list[str] = []
    i += 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\\" and i + 1 < n and text[i + 1] in ('"', "\\"):
            out.append(text[i + 1])
            i += 2
        elif c == '"':
            return "".join(out), i + 1
        else:
            out.append(c)
            i += 1
    raise ParseError(f"unterminated {construct}: missing closing '\"'")


def _scan_regex(text: str, i: int) -> tuple[str, int]:
    """Scan a /.../ atom starting at ``text[i] == '/'``; unescapes \\/ only."""
    out: list[str] = []
    i += 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\\" and i + 1 < n:
            if text[i + 1] == "/":
                out.append("/")
            else:
                out.append(c)
                out.append(text[i + 1])
            i += 2
        elif c == "/":
            i += 1
            if i < n and not text[i].isspace() and text[i] not in (_LP, _RP):
                raise ParseError(
                    f"unexpected text after closing '/' of regex /{''.join(out)}/"
                )
            return "".join(out), i
        else:
            out.append(c)
            i += 1
    raise ParseError("unterminated regex: missing closing '/'")


def _scan_word(text: str, i: int) -> tuple[_Token, int]:
    start = i
    n = len(text)
    out: list[str] = []
    while i < n and not text[i].isspace() and text[i] not in (_LP, _RP):
        word = "".join(out)
        if text[i] == '"' and _filter_field(word) is not None:
            # field:"quoted value" extends across whitespace
            value, i = _scan_quoted(text, i, "filter value")
            if i < n and not text[i].isspace() and text[i] not in (_LP, _RP):
                raise ParseError(f"unexpected text after quoted value of '{word}'")
            field = _filter_field(word)
            assert field is not None
            if not value:
                raise ParseError(f"filter '{word}' requires a non-empty value")
            return _Token("filter", Filter(field, value), start), i
        out.append(text[i])
        i += 1
    word = "".join(out)
    if word in _OPERATORS:
        return _Token("op", word, start), i
    field = _filter_field(word)
    if field is not None:
        raise ParseError(f"filter '{word}' requires a value")
    for prefix in (*FILTER_FIELDS, *_FIELD_ALIASES):
        head = prefix + ":"
        if word.startswith(head) and len(word) > len(head):
            canonical = _FIELD_ALIASES.get(prefix, prefix)
            return _Token("filter", Filter(canonical, word[len(head):]), start), i
    return _Token("atom", PatternAtom(word), start), i


def _filter_field(word: str) -> Optional[str]:
    """Map 'repo:' / 'language:' style prefixes (value still missing) to a field."""
    if word.endswith(":"):
        name = word[:-1]
        if name in FILTER_FIELDS:
            return name
        if name in _FIELD_ALIASES:
            return _FIELD_ALIASES[name]
    return None


# --------------------------------------------------------------------------
# parser

class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    # or_expr := and_chain (OR and_chain)*
    def parse_or(self) -> Node:
        parts = [self.parse_and_chain()]
        while (tok := self.peek()) and tok.kind == "op" and tok.value == "OR":
            self.take()
            parts.append(self.parse_and_chain())
        if len(parts) == 1:
            return parts[0]
        return Or(tuple(parts))

    # and_chain := juxt (AND juxt)*   -- unparenthesized Ands flatten
    def parse_and_chain(self) -> Node:
        parts = [self.parse_juxt()]
        explicit = False
        while (tok := self.peek()) and tok.kind == "op" and tok.value == "AND":
            self.take()
            explicit = True
            parts.append(self.parse_juxt())
        if not explicit:
            return parts[0][0]
        children: list[Node] = []
        for part, grouped in parts:
            if isinstance(part, And) and not grouped:
                children.extend(part.children)
            else:
                children.append(part)
        return _make_and(children)

    def parse_juxt(self):
        """One run of adjacent primaries; returns (node, came_from_single_group)."""
        filters: list[Node] = []
        patterns: list[Node] = []
        run: list[PatternAtom] = []
        grouped = False

        def flush() -> None:
            if run:
                patterns.append(Sequence(tuple(run)))
                run.clear()

        while (tok := self.peek()) is not None:
            if tok.kind == "atom":
                self.take()
                run.append(tok.value)  # type: ignore[arg-type]
            elif tok.kind == "filter":
                self.take()
                filters.append(FilterNode(tok.value))  # type: ignore[arg-type]
            elif tok.kind == "lp":
                self.take()
                if self.peek() is None:
                    raise ParseError(f"unclosed group: missing ')' ({_PAREN_HINT})")
                inner = self.parse_or()
                closing = self.peek()
                if closing is None or closing.kind != "rp":
                    raise ParseError(f"unclosed group: missing ')' ({_PAREN_HINT})")
                self.take()
                flush()
                patterns.append(inner)
                grouped = True
            elif tok.kind == "op" and tok.value == "NOT":
                self.take()
                flush()
                patterns.append(Not(self.parse_not_operand()))
            else:
                break
        flush()
        items = filters + patterns
        if not items:
            nxt = self.peek()
            if nxt is None:
                raise ParseError("dangling operator: expected a pattern or filter")
            if nxt.kind == "rp":
                raise ParseError(f"empty group or unmatched ')' ({_PAREN_HINT})")
            raise ParseError(f"dangling operator '{nxt.value}': expected a pattern or filter")
        if len(items) == 1:
            only_group = grouped and not filters and not run
            return items[0], only_group
        return _make_and(items), False

    def parse_not_operand(self) -> Node:
        tok = self.peek()
        if tok is None:
            raise ParseError("dangling operator 'NOT': expected a pattern or filter")
        if tok.kind == "atom":
            self.take()
            return Sequence((tok.value,))  # type: ignore[arg-type]
        if tok.kind == "filter":
            self.take()
            return FilterNode(tok.value)  # type: ignore[arg-type]
        if tok.kind == "lp":
            self.take()
            inner = self.parse_or()
            closing = self.peek()
            if closing is None or closing.kind != "rp":
                raise ParseError(f"unclosed group: missing ')' ({_PAREN_HINT})")
            self.take()
            return inner
        if tok.kind == "op" and tok.value == "NOT":
            self.take()
            return Not(self.parse_not_operand())
        raise ParseError(f"operator 'NOT' cannot apply to '{tok.value}'")


def _make_and(children: list[Node]) -> Node:
    if len(children) == 1:
        return children[0]
    filters = [c for c in children if isinstance(c, FilterNode)]
    rest = [c for c in children if not isinstance(c, FilterNode)]
    return And(tuple(filters + rest))


def parse(text: str) -> Query:
    """Parse a query string; empty/whitespace-only input yields None."""
    tokens = _tokenize(text)
    if not tokens:
        return None
    parser = _Parser(tokens)
    node = parser.parse_or()
    leftover = parser.peek()
    if leftover is not None:
        if leftover.kind == "rp":
            raise ParseError(f"unmatched ')' ({_PAREN_HINT})")
        raise ParseError(f"unexpected '{leftover.value}'")
    return node


# --------------------------------------------------------------------------
# canonical printer

def _atom_str(atom: PatternAtom) -> str:
    if atom.kind is AtomKind.REGEX:
        return "/" + atom.text.replace("/", "\\/") + "/"
    if atom.quoted:
        escaped = atom.text.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return atom.text


def _filter_str(f: Filter) -> str:
    value = f.value
    if any(ch.isspace() for ch in value) or '"' in value or value[:1] == '"':
        value = '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return f"{f.field}:{value}"


def to_query_string(q: Query) -> str:
    """Render a canonical query string; parse(to_query_string(q)) == q."""
    if q is None:
        return ""
    return _print_node(q, "root")


def _print_node(node: Node, ctx: str) -> str:
    if isinstance(node, Sequence):
        body = " ".join(_atom_str(a) for a in node.atoms)
        if ctx == "not" and len(node.atoms) > 1:
            return f"({body})"
        return body
    if isinstance(node, FilterNode):
        return _filter_str(node.filter)
    if isinstance(node, Not):
        body = "NOT " + _print_node(node.child, "not")
        return f"({body})" if ctx == "not" else body
    if isinstance(node, Or):
        body = " OR ".join(_print_node(c, "or") for c in node.children)
        return f"({body})" if ctx in ("and", "or", "not") else body
    if isinstance(node, And):
        filters = [c for c in node.children if isinstance(c, FilterNode)]
        rest = [c for c in node.children if not isinstance(c, FilterNode)]
        segments: list[str] = [" ".join(_print_node(f, "and") for f in filters)]
        if rest:
            segments.append(" AND ".join(_print_node(c, "and") for c in rest))
        body = " ".join(s for s in segments if s)
        return f"({body})" if ctx in ("and", "not") else body
    raise TypeError(f"not a query node: {node!r}")


# --------------------------------------------------------------------------
# structure helpers and validation

def walk(q: Query) -> Iterator[Node]:
    """Yield every node in the tree, pre-order."""
    if q is None:
        return
    stack: list[Node] = [q]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, (And, Or)):
            stack.extend(reversed(node.children))
        elif isinstance(node, Not):
            stack.append(node.child)


def top_level_sequences(q: Query) -> tuple[Sequence, ...]:
    """Sequences at the root: the root itself, or Sequence children of a root And."""
    if isinstance(q, Sequence):
        return (q,)
    if isinstance(q, And):
        return tuple(c for c in q.children if isinstance(c, Sequence))
    return ()


def has_lang_filter(q: Query) -> bool:
    return any(
        isinstance(node, FilterNode) and node.filter.field == "lang"
        for node in walk(q)
    )


def all_atoms(q: Query) -> Iterator[PatternAtom]:
    for node in walk(q):
        if isinstance(node, Sequence):
            yield from node.atoms


def _bare_renderable(text: str) -> bool:
    if not text or text in _OPERATORS:
        return False
    if text[0] in ('"', "/"):
        return False
    if any(c.isspace() or c in "()" for c in text):
        return False
    for prefix in (*FILTER_FIELDS, *_FIELD_ALIASES):
        if text.startswith(prefix + ":") and len(text) > len(prefix) + 1:
            return False
        if text == prefix + ":":
            return False
    return True


def validate(q: Query) -> None:
    """Check AST invariants; raises ValueError naming the violation.

    Covers arity, atom/filter well-formedness, and canonical And ordering
    (filters before other children), which the round-trip guarantee relies on.
    """
    if q is None:
        return
    for node in walk(q):
        if isinstance(node, Sequence):
            if not node.atoms:
                raise ValueError("Sequence must have at least one atom")
            for atom in node.atoms:
                if not atom.text:
                    raise ValueError("atom text must be non-empty")
                if atom.quoted and atom.kind is not AtomKind.LITERAL:
                    raise ValueError("quoted atoms must be literal")
                if atom.kind is AtomKind.REGEX:
                    err = regex_subset_error(atom.text)
                    if err is not None:
                        raise ValueError(f"regex atom rejected: {err}")
                elif not atom.quoted and not _bare_renderable(atom.text):
                    raise ValueError(
                        f"literal atom {atom.text!r} cannot be rendered bare; quote it"
                    )
        elif isinstance(node, FilterNode):
            if node.filter.field not in FILTER_FIELDS:
                raise ValueError(f"unknown filter field {node.filter.field!r}")
            if not node.filter.value:
                raise ValueError("filter value must be non-empty")
        elif isinstance(node, (And, Or)):
            if len(node.children) < 2:
                raise ValueError(f"{type(node).__name__} needs >= 2 children")
            if isinstance(node, And):
                seen_pattern = False
                for child in node.children:
                    if isinstance(child, FilterNode):
                        if seen_pattern:
                            raise ValueError(
                                "And children must list filters before patterns"
                            )
                    else:
                        seen_pattern = True


def unquote_words(text: str) -> Optional[tuple[str, ...]]:
    """Whitespace-split words of quoted text, if each renders as a bare atom.

    Returns None when the text has no words or some word would re-tokenize as
    an operator, filter, regex, quote, or parenthesis rather than a plain
    literal; such an atom cannot be unquoted without changing what it means.
    """
    words = tuple(text.split())
    if words and all(_bare_renderable(w) for w in words):
        return words
    return None
