from __future__ import annotations

import os

import pytest

from smartsearch.corpus import Corpus, ingest

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")
MINI_ROOT = os.path.abspath(os.path.join(FIXTURES, "mini"))
QUERIES_50 = os.path.abspath(os.path.join(FIXTURES, "queries50.ndjson"))
GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


@pytest.fixture(scope="session")
def mini_corpus() -> Corpus:
    return ingest(MINI_ROOT)


@pytest.fixture(scope="session")
def mini_snapshot(tmp_path_factory) -> str:
    from smartsearch import snapshot

    path = str(tmp_path_factory.mktemp("snap") / "mini.idx")
    snapshot.save(ingest(MINI_ROOT), path)
    return path


def golden_path(name: str) -> str:
    return os.path.join(GOLDEN, name)


def read_golden_bytes(name: str) -> bytes:
    with open(golden_path(name), "rb") as fh:
        return fh.read()


def read_golden_text(name: str) -> str:
    with open(golden_path(name), "r", encoding="utf-8") as fh:
        return fh.read()
