"""Query transformation rules.

Each rule repairs one well-known way a query can be misinterpreted, ordered
most-specific first:

  1. language  -- a bare term that names a language becomes a lang: filter
  2. regex     -- literal text that looks like a regex is searched as one
  3. unquote   -- quoted patterns are retried without their quotes
  4. and       -- a multi-term pattern is retried as an AND of its terms

applicable() is a pure predicate; apply() returns a structurally different
tree and never mutates its input. language/regex/and act on top-level
Sequences only; unquote clears quoted flags across the whole tree (so it is
never applicable to its own output).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

from . import languages
from .querylang import (
    And,
    AtomKind,
    Filter,
    FilterNode,
    Node,
    Not,
    Or,
    PatternAtom,
    Query,
    Sequence,
    count_metasyntax,
    has_lang_filter,
    is_valid_regex,
    top_level_sequences,
    unquote_words,
    walk,
)

LANGUAGE = "language"
REGEX = "regex"
UNQUOTE = "unquote"
AND = "and"

# priority order: most specific transformation first
RULE_IDS: tuple[str, ...] = (LANGUAGE, REGEX, UNQUOTE, AND)

DESCRIPTIONS: dict[str, str] = {
    LANGUAGE: "Apply language filter for pattern",
    AND: "Also search for each term separately",
    UNQUOTE: "Search without quotes",
    REGEX: "Interpret pattern as a regular expression",
}


@dataclass(frozen=True)
class Rule:
    rule_id: str
    description: str
    priority: int  # 1-based, lower is more specific


RULES: tuple[Rule, ...] = tuple(
    Rule(rule_id, DESCRIPTIONS[rule_id], i + 1) for i, rule_id in enumerate(RULE_IDS)
)


def priority_of(rule_id: str) -> int:
    return RULE_IDS.index(rule_id) + 1


# --------------------------------------------------------------------------
# language

def _language_target(q: Query) -> Optional[tuple[Sequence, int, str]]:
    if has_lang_filter(q):
        return None
    for seq in top_level_sequences(q):
        for idx, atom in enumerate(seq.atoms):
            if atom.kind is not AtomKind.LITERAL or atom.quoted:
                continue
            resolved = languages.resolve_alias(atom.text)
            if resolved is not None:
                return seq, idx, resolved
    return None


def _apply_language(q: Node) -> Node:
    target = _language_target(q)
    assert target is not None, "apply() requires applicable()"
    seq, idx, resolved = target
    remaining = seq.atoms[:idx] + seq.atoms[idx + 1 :]
    new_seq = Sequence(remaining) if remaining else None
    lang_filter = FilterNode(Filter("lang", resolved))
    if isinstance(q, Sequence):
        if new_seq is None:
            return lang_filter
        return And((lang_filter, new_seq))
    assert isinstance(q, And)
    children: list[Node] = [lang_filter]
    for child in q.children:
        if child is seq:
            if new_seq is not None:
                children.append(new_seq)
        else:
            children.append(child)
    if len(children) == 1:
        return children[0]
    filters = [c for c in children if isinstance(c, FilterNode)]
    rest = [c for c in children if not isinstance(c, FilterNode)]
    return And(tuple(filters + rest))


# --------------------------------------------------------------------------
# regex

def _regex_atom_eligible(atom: PatternAtom) -> bool:
    return (
        atom.kind is AtomKind.LITERAL
        and not atom.quoted
        and count_metasyntax(atom.text) >= 2
        and is_valid_regex(atom.text)
    )


def _regex_target(q: Query) -> Optional[tuple[Sequence, Optional[int]]]:
    """(sequence, atom index) to convert, or (sequence, None) for a whole join."""
    for seq in top_level_sequences(q):
        for idx, atom in enumerate(seq.atoms):
            if _regex_atom_eligible(atom):
                return seq, idx
        if len(seq.atoms) >= 2 and all(
            a.kind is AtomKind.LITERAL and not a.quoted for a in seq.atoms
        ):
            joined = " ".join(a.text for a in seq.atoms)
            if count_metasyntax(joined) >= 2 and is_valid_regex(joined):
                return seq, None
    return None


def _apply_regex(q: Node) -> Node:
    target = _regex_target(q)
    assert target is not None, "apply() requires applicable()"
    seq, idx = target
    if idx is None:
        joined = " ".join(a.text for a in seq.atoms)
        new_seq = Sequence((PatternAtom(joined, AtomKind.REGEX),))
    else:
        atoms = list(seq.atoms)
        atoms[idx] = replace(atoms[idx], kind=AtomKind.REGEX)
        new_seq = Sequence(tuple(atoms))
    return _replace_top_sequence(q, seq, new_seq)


# --------------------------------------------------------------------------
# unquote

def _unquotable(atom: PatternAtom) -> bool:
    return (
        atom.quoted
        and atom.kind is AtomKind.LITERAL
        and unquote_words(atom.text) is not None
    )


def _applicable_unquote(q: Query) -> bool:
    return any(
        _unquotable(atom)
        for node in walk(q)
        if isinstance(node, Sequence)
        for atom in node.atoms
    )


def _apply_unquote(q: Node) -> Node:
    def expand(atom: PatternAtom) -> tuple[PatternAtom, ...]:
        # Quoted text becomes the terms the user would have typed without
        # quotes: one bare atom per word.  Atoms whose words cannot render
        # bare (operators, filters, embedded quotes, ...) are kept quoted.
        if not _unquotable(atom):
            return (atom,)
        words = unquote_words(atom.text)
        assert words is not None
        return tuple(PatternAtom(w, AtomKind.LITERAL) for w in words)

    def rewrite(node: Node) -> Node:
        if isinstance(node, Sequence):
            return Sequence(tuple(out for a in node.atoms for out in expand(a)))
        if isinstance(node, And):
            return And(tuple(rewrite(c) for c in node.children))
        if isinstance(node, Or):
            return Or(tuple(rewrite(c) for c in node.children))
        if isinstance(node, Not):
            return Not(rewrite(node.child))
        return node

    return rewrite(q)


# --------------------------------------------------------------------------
# and

def _and_targets(q: Query) -> list[Sequence]:
    return [seq for seq in top_level_sequences(q) if len(seq.atoms) >= 2]


def _apply_and(q: Node) -> Node:
    targets = _and_targets(q)
    assert targets, "apply() requires applicable()"

    def split(seq: Sequence) -> tuple[Node, ...]:
        return tuple(Sequence((atom,)) for atom in seq.atoms)

    if isinstance(q, Sequence):
        return And(split(q))
    assert isinstance(q, And)
    children: list[Node] = []
    for child in q.children:
        if isinstance(child, Sequence) and len(child.atoms) >= 2:
            children.extend(split(child))
        else:
            children.append(child)
    return And(tuple(children))


def _replace_top_sequence(q: Node, old: Sequence, new: Sequence) -> Node:
    if isinstance(q, Sequence):
        assert q is old
        return new
    assert isinstance(q, And)
    return And(tuple(new if child is old else child for child in q.children))


# --------------------------------------------------------------------------
# public API

_APPLICABLE: dict[str, Callable[[Query], bool]] = {
    LANGUAGE: lambda q: _language_target(q) is not None,
    REGEX: lambda q: _regex_target(q) is not None,
    UNQUOTE: _applicable_unquote,
    AND: lambda q: bool(_and_targets(q)),
}

_APPLY: dict[str, Callable[[Node], Node]] = {
    LANGUAGE: _apply_language,
    REGEX: _apply_regex,
    UNQUOTE: _apply_unquote,
    AND: _apply_and,
}


def applicable(rule_id: str, q: Query) -> bool:
    """True when the rule's precondition holds; False for empty queries."""
    if rule_id not in _APPLICABLE:
        raise ValueError(f"unknown rule {rule_id!r}")
    if q is None:
        return False
    return _APPLICABLE[rule_id](q)


def apply(rule_id: str, q: Node) -> Node:
    """Transform q; pre: applicable(rule_id, q). Never returns q unchanged."""
    if rule_id not in _APPLY:
        raise ValueError(f"unknown rule {rule_id!r}")
    result = _APPLY[rule_id](q)
    assert result != q, f"rule {rule_id} returned a structurally identical query"
    return result


def describe(applied_rules: tuple[str, ...]) -> str:
    """Human description for a rule chain; chains join with ' and then '."""
    parts = [DESCRIPTIONS[r] for r in applied_rules]
    head = parts[0]
    for extra in parts[1:]:
        head += " and then " + extra[0].lower() + extra[1:]
    return head
