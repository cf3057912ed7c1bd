"""Bounded lazy enumeration of alternative query candidates.

Candidates are rule combinations applied to the original query: all four
singletons in priority order, then pairs, triples and the quadruple in
lexicographic priority order, always applying the higher-priority rule
first. Each step's precondition must hold on the intermediate tree or the
combination is pruned. Results that structurally duplicate the original or
an earlier candidate are skipped without consuming the budget.

The enumeration is a true generator: asking for k candidates performs no
transformation work beyond what those k (plus the skipped attempts between
them) require.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

from . import rules
from .querylang import Node, Query, to_query_string

DEFAULT_MAX_CANDIDATES = 5


@dataclass(frozen=True)
class CandidateQuery:
    ast: Node
    applied_rules: tuple[str, ...]  # in application (priority) order
    rank: int  # 1-based position in the yielded stream
    rendered: str


def rule_combinations() -> Iterator[tuple[str, ...]]:
    for size in range(1, len(rules.RULE_IDS) + 1):
        yield from combinations(rules.RULE_IDS, size)


def generate(
    original: Query, max_candidates: int = DEFAULT_MAX_CANDIDATES
) -> Iterator[CandidateQuery]:
    if original is None or max_candidates <= 0:
        return iter(())

    def emit() -> Iterator[CandidateQuery]:
        produced = 0
        earlier: list[Node] = []
        for combo in rule_combinations():
            ast: Node = original
            pruned = False
            for rule_id in combo:
                if not rules.applicable(rule_id, ast):
                    pruned = True
                    break
                ast = rules.apply(rule_id, ast)
            if pruned:
                continue
            if ast == original or any(ast == prev for prev in earlier):
                continue
            earlier.append(ast)
            produced += 1
            yield CandidateQuery(
                ast=ast,
                applied_rules=combo,
                rank=produced,
                rendered=to_query_string(ast),
            )
            if produced >= max_candidates:
                return

    return emit()
