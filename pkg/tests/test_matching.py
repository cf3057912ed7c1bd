from __future__ import annotations

import random

import pytest

from smartsearch.corpus import from_documents
from smartsearch.matching import (
    MatchRecord,
    Provenance,
    count_matches,
    prefilter_candidates,
    regex_required_literals,
    search,
    sequence_pattern,
)
from smartsearch.querylang import parse, ParseError

from fuzz import random_corpus, random_query
from reference import matching_doc_ids, naive_search

BIG = 10**9


def collect(corpus, q, limit=BIG, **kwargs):
    records: list[MatchRecord] = []
    stats = search(corpus, q, limit, records.append, **kwargs)
    return records, stats


def as_tuples(records):
    return [
        (r.repo, r.path, r.line_number, r.start, r.end, r.line_text)
        for r in records
    ]


def corpus_of(*docs):
    return from_documents(list(docs))


# --------------------------------------------------------------------------
# basic semantics

def test_sequence_matches_space_joined_literal():
    corpus = corpus_of(("r", "a.go", "func parse(s string)\nfunc parseAll()\nfuncparse"))
    records, stats = collect(corpus, parse("func parse"))
    assert as_tuples(records) == [
        ("r", "a.go", 1, 0, 10, "func parse(s string)"),
        ("r", "a.go", 2, 0, 10, "func parseAll()"),
    ]
    assert stats.emitted_count == 2 and not stats.limit_hit


def test_and_is_file_scope(
):
    corpus = corpus_of(
        ("r", "both.txt", "func here\nand later\nparse there"),
        ("r", "only.txt", "func alone"),
    )
    records, _ = collect(corpus, parse("func AND parse"))
    assert as_tuples(records) == [
        ("r", "both.txt", 1, 0, 4, "func here"),
        ("r", "both.txt", 3, 0, 5, "parse there"),
    ]


def test_quoted_atom_matches_text_with_quotes():
    corpus = corpus_of(
        ("r", "a.json", '"version": "v1.3"'),
        ("r", "b.md", "release v1.3 notes"),
    )
    with_quotes, _ = collect(corpus, parse('"v1.3"'))
    assert as_tuples(with_quotes) == [("r", "a.json", 1, 11, 17, '"version": "v1.3"')]
    bare, _ = collect(corpus, parse("v1.3"))
    assert {(r.path, r.line_number) for r in bare} == {("a.json", 1), ("b.md", 1)}


def test_regex_atom_matches_within_line():
    corpus = corpus_of(("r", "a.java", "import javax.swing.JFrame;\nno match"))
    records, _ = collect(corpus, parse("/swing\\..*/"))
    assert as_tuples(records) == [("r", "a.java", 1, 13, 26, "import javax.swing.JFrame;")]


def test_zero_length_regex_matches_are_skipped():
    corpus = corpus_of(("r", "a.txt", "abc"))
    records, _ = collect(corpus, parse("/x*/"))
    assert records == []


def test_mixed_sequence_literal_and_regex():
    corpus = corpus_of(("r", "a.txt", "alpha beta12 gamma\nalpha beta gamma"))
    records, _ = collect(corpus, parse("alpha /beta\\d+/ gamma"))
    assert as_tuples(records) == [("r", "a.txt", 1, 0, 18, "alpha beta12 gamma")]


def test_or_union_deduplicates():
    corpus = corpus_of(("r", "a.txt", "shared token line"))
    records, _ = collect(corpus, parse("shared OR /sha.ed/"))
    assert as_tuples(records) == [("r", "a.txt", 1, 0, 6, "shared token line")]


def test_not_excludes_documents_entirely():
    corpus = corpus_of(
        ("r", "bad.txt", "parse with legacy marker"),
        ("r", "good.txt", "parse cleanly"),
    )
    records, _ = collect(corpus, parse("NOT legacy parse"))
    assert [r.path for r in records] == ["good.txt"]


def test_bare_not_emits_nothing():
    corpus = corpus_of(("r", "a.txt", "alpha\nbeta"))
    records, _ = collect(corpus, parse("NOT zzz"))
    assert records == []


def test_filter_only_query_emits_nonempty_lines():
    corpus = corpus_of(
        ("r", "a.py", "import os\n\nprint(1)"),
        ("r", "b.go", "package main"),
    )
    records, _ = collect(corpus, parse("lang:python"))
    assert as_tuples(records) == [
        ("r", "a.py", 1, 0, 9, "import os"),
        ("r", "a.py", 3, 0, 8, "print(1)"),
    ]


def test_repo_and_path_filters_are_substring():
    corpus = corpus_of(
        ("webapp", "src/app.ts", "x marker"),
        ("server", "src/main.py", "x marker"),
    )
    records, _ = collect(corpus, parse("repo:web marker"))
    assert [r.repo for r in records] == ["webapp"]
    records, _ = collect(corpus, parse("path:main marker"))
    assert [r.repo for r in records] == ["server"]


def test_lang_filter_resolves_aliases_case_insensitively():
    corpus = corpus_of(("r", "a.py", "code here"), ("r", "b.go", "code here"))
    for value in ("python", "Python", "py"):
        records, _ = collect(corpus, parse(f"lang:{value} code"))
        assert [r.path for r in records] == ["a.py"]


def test_unresolvable_lang_filter_matches_nothing():
    corpus = corpus_of(("r", "a.py", "code"))
    records, stats = collect(corpus, parse("lang:klingon code"))
    assert records == [] and stats.emitted_count == 0


def test_content_filter_is_document_level():
    corpus = corpus_of(
        ("r", "a.txt", "needle\nother line"),
        ("r", "b.txt", "just hay"),
    )
    records, _ = collect(corpus, parse("content:needle other"))
    assert as_tuples(records) == [("r", "a.txt", 2, 0, 5, "other line")]


def test_negated_filter_inverts():
    corpus = corpus_of(("r", "a.py", "marker"), ("r", "b.go", "marker"))
    records, _ = collect(corpus, parse("NOT lang:python marker"))
    assert [r.path for r in records] == ["b.go"]


def test_empty_query_matches_nothing():
    corpus = corpus_of(("r", "a.txt", "anything"))
    records, stats = collect(corpus, None)
    assert records == [] and stats.emitted_count == 0 and not stats.limit_hit


# --------------------------------------------------------------------------
# offsets

def test_byte_offsets_for_multibyte_lines():
    corpus = corpus_of(("r", "a.txt", "naïve café test"))
    records, _ = collect(corpus, parse("café"))
    (rec,) = records
    line = "naïve café test"
    assert rec.start == len(line[: line.index("café")].encode("utf-8")) == 7
    assert rec.end == rec.start + len("café".encode("utf-8")) == 12
    assert line.encode("utf-8")[rec.start : rec.end].decode("utf-8") == "café"


def test_offsets_are_half_open_and_bounded():
    corpus = corpus_of(("r", "a.txt", "x abc x abc"))
    records, _ = collect(corpus, parse("abc"))
    for r in records:
        assert 0 <= r.start < r.end <= len(r.line_text.encode("utf-8"))
    assert [(r.start, r.end) for r in records] == [(2, 5), (8, 11)]


# --------------------------------------------------------------------------
# limits and stats

def test_limit_truncates_and_reports_hit():
    corpus = corpus_of(("r", "a.txt", "\n".join(["hit"] * 5)))
    records, stats = collect(corpus, parse("hit"), limit=3)
    assert len(records) == 3
    assert stats.emitted_count == 3 and stats.limit_hit


def test_limit_exact_boundary_is_not_a_hit():
    corpus = corpus_of(("r", "a.txt", "\n".join(["hit"] * 3)))
    _, stats = collect(corpus, parse("hit"), limit=3)
    assert stats.emitted_count == 3 and not stats.limit_hit


def test_limit_zero_reports_potential_match():
    corpus = corpus_of(("r", "a.txt", "hit"))
    records, stats = collect(corpus, parse("hit"), limit=0)
    assert records == []
    assert stats.emitted_count == 0 and stats.limit_hit
    _, stats = collect(corpus, parse("miss"), limit=0)
    assert not stats.limit_hit


def test_search_results_are_prefix_stable_across_limits():
    rng = random.Random(7)
    corpus = random_corpus(rng, max_files=8)
    for _ in range(30):
        q_text = random_query(rng)
        try:
            q = parse(q_text)
        except ParseError:
            continue
        full, _ = collect(corpus, q)
        for lim in (0, 1, 2, 5):
            part, stats = collect(corpus, q, limit=lim)
            assert part == full[:lim]
            assert stats.limit_hit == (len(full) > lim)


def test_provenance_attached_to_records():
    corpus = corpus_of(("r", "a.txt", "hit"))
    prov = Provenance("candidate", 2, ("and",))
    records, _ = collect(corpus, parse("hit"), source=prov)
    assert records[0].source is prov


def test_count_matches_matches_search():
    corpus = corpus_of(("r", "a.txt", "a\na\na"))
    stats = count_matches(corpus, parse("a"), 2)
    assert stats.emitted_count == 2 and stats.limit_hit


# --------------------------------------------------------------------------
# oracle equivalence and determinism

def test_fixture_queries_match_oracle(mini_corpus):
    for text in [
        "jest test typescript", "func parse", '"v1.3"', "v1.3", "swing.*",
        "/swing.*/", "python", "lang:python", "jest AND test AND typescript",
        "lang:typescript jest test", "repo:server json", "NOT lang:markdown parse",
        "clamp OR describe", "content:jest path:src", "/im+port/ OR /v1\\.\\d/",
    ]:
        q = parse(text)
        records, _ = collect(mini_corpus, q)
        assert as_tuples(records) == naive_search(mini_corpus, q), text


def test_fuzzed_corpora_match_oracle():
    rng = random.Random(20260814)
    checked = 0
    for round_ in range(60):
        corpus = random_corpus(rng)
        for _ in range(10):
            text = random_query(rng)
            try:
                q = parse(text)
            except ParseError:
                continue
            records, stats = collect(corpus, q)
            expected = naive_search(corpus, q)
            assert as_tuples(records) == expected, (round_, text)
            assert stats.emitted_count == len(expected)
            checked += 1
    assert checked > 300


def test_search_deterministic_across_runs(mini_corpus):
    q = parse("jest OR test OR path:src")
    first, _ = collect(mini_corpus, q)
    second, _ = collect(mini_corpus, q)
    assert first == second


def test_search_same_with_and_without_index():
    rng = random.Random(99)
    for _ in range(20):
        corpus = random_corpus(rng)
        no_index = from_documents(
            [(d.repo, d.path, "\n".join(d.lines)) for d in corpus.documents],
            build_index=False,
        )
        text = random_query(rng)
        try:
            q = parse(text)
        except ParseError:
            continue
        with_idx, _ = collect(corpus, q)
        without_idx, _ = collect(no_index, q)
        assert as_tuples(with_idx) == as_tuples(without_idx)


# --------------------------------------------------------------------------
# trigram prefilter

def test_prefilter_requires_index():
    corpus = from_documents([("r", "a.txt", "x")], build_index=False)
    with pytest.raises(ValueError):
        prefilter_candidates(corpus, parse("abc"))


def test_prefilter_superset_fuzzed():
    rng = random.Random(4242)
    for _ in range(200):
        corpus = random_corpus(rng)
        text = random_query(rng)
        try:
            q = parse(text)
        except ParseError:
            continue
        allowed = prefilter_candidates(corpus, q)
        needed = matching_doc_ids(corpus, q)
        assert needed <= allowed, text


def test_prefilter_literal_is_exact_for_long_literals(mini_corpus):
    ids = prefilter_candidates(mini_corpus, parse("parse"))
    for doc_id in ids:
        doc = mini_corpus.documents[doc_id]
        # every trigram of "parse" appears; the full word may still be absent
        assert any("par" in line for line in doc.lines)
    needed = matching_doc_ids(mini_corpus, parse("parse"))
    assert needed <= ids


def test_prefilter_short_literal_returns_universe(mini_corpus):
    assert prefilter_candidates(mini_corpus, parse("ab")) == set(
        mini_corpus.all_ids()
    )


def test_prefilter_or_unions(mini_corpus):
    a = prefilter_candidates(mini_corpus, parse("jest"))
    b = prefilter_candidates(mini_corpus, parse("swing"))
    assert prefilter_candidates(mini_corpus, parse("jest OR swing")) == a | b


def test_prefilter_none_query_empty(mini_corpus):
    assert prefilter_candidates(mini_corpus, None) == set()


@pytest.mark.parametrize(
    "pattern,expected",
    [
        ("abc", ["abc"]),
        ("ab*c", ["a", "c"]),
        ("ab+c", ["ab", "c"]),
        ("ab?c", ["a", "c"]),
        ("a.c", ["a", "c"]),
        ("swing.*", ["swing"]),
        ("a|b", []),
        ("(ab)c", ["c"]),
        ("[xy]abc", ["abc"]),
        (r"v1\.\d", ["v1."]),
        ("a{0,2}b", ["b"]),
        ("a{2}b", ["a", "b"]),
        (r"\bword\b", ["word"]),
        ("^import", ["import"]),
    ],
)
def test_regex_required_literals(pattern, expected):
    assert regex_required_literals(pattern) == expected


def test_sequence_pattern_composition():
    q = parse('func "v 1" /x+/')
    assert sequence_pattern(q) == 'func "v 1" (?:x+)'
