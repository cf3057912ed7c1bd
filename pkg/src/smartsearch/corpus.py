"""Corpus ingestion and the trigram prefilter index.

Documents come from a directory tree: each top-level subdirectory is a repo
(files sitting directly under the root belong to a repo named after the root
itself). Document ids are dense and assigned in lexicographic (repo, path)
order, so ingest is deterministic for a given tree.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

from . import languages

DEFAULT_MAX_FILE_SIZE = 1 << 20  # 1 MiB
_BINARY_SNIFF_LEN = 8192

# directory names never descended into
DEFAULT_IGNORE_DIRS = (
    ".git",
    ".hg",
    ".svn",
    "node_modules",
    "__pycache__",
    "target",
    "build",
    "dist",
)


@dataclass(frozen=True)
class Document:
    doc_id: int
    repo: str
    path: str
    language: str
    lines: tuple[str, ...]


@dataclass
class IngestConfig:
    max_file_size: int = DEFAULT_MAX_FILE_SIZE
    ignore_dirs: tuple[str, ...] = DEFAULT_IGNORE_DIRS
    build_index: bool = True


@dataclass
class IngestReport:
    files_indexed: int = 0
    skipped_oversize: int = 0
    skipped_binary: int = 0
    skipped_unreadable: int = 0

    @property
    def files_skipped(self) -> int:
        return self.skipped_oversize + self.skipped_binary + self.skipped_unreadable


@dataclass
class Corpus:
    documents: tuple[Document, ...]
    trigram_index: Optional[dict[bytes, frozenset[int]]] = None
    ingest_report: Optional[IngestReport] = None

    def all_ids(self) -> range:
        return range(len(self.documents))


def _split_lines(text: str) -> tuple[str, ...]:
    # plain \n discipline; \r\n normalized; the trailing newline does not
    # produce a phantom empty last line
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return tuple(line[:-1] if line.endswith("\r") else line for line in lines)


def line_trigrams(line: str) -> set[bytes]:
    data = line.encode("utf-8")
    return {data[i : i + 3] for i in range(len(data) - 2)}


def build_trigram_index(documents: tuple[Document, ...]) -> dict[bytes, frozenset[int]]:
    postings: dict[bytes, set[int]] = {}
    for doc in documents:
        grams: set[bytes] = set()
        for line in doc.lines:
            grams |= line_trigrams(line)
        for gram in grams:
            postings.setdefault(gram, set()).add(doc.doc_id)
    return {gram: frozenset(ids) for gram, ids in postings.items()}


def _looks_binary(head: bytes) -> bool:
    return b"\x00" in head


def ingest(root: str, config: Optional[IngestConfig] = None) -> Corpus:
    """Build a Corpus from a directory tree.

    Oversize and binary files are skipped (counted in the report), as are
    files that cannot be read; ignored directory names are pruned during the
    walk. Undecodable bytes in otherwise-text files are replaced rather than
    failing the file.
    """
    config = config or IngestConfig()
    root = os.path.abspath(root)
    if not os.path.isdir(root):
        raise NotADirectoryError(f"ingest root is not a directory: {root}")
    ignore = set(config.ignore_dirs)
    report = IngestReport()

    entries: list[tuple[str, str, str]] = []  # (repo, relpath, abspath)
    root_repo = os.path.basename(root.rstrip(os.sep)) or root
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames[:] = sorted(d for d in dirnames if d not in ignore)
        for name in filenames:
            abspath = os.path.join(dirpath, name)
            rel = os.path.relpath(abspath, root)
            parts = rel.split(os.sep)
            if len(parts) == 1:
                repo, path = root_repo, parts[0]
            else:
                repo, path = parts[0], "/".join(parts[1:])
            entries.append((repo, path, abspath))
    entries.sort(key=lambda e: (e[0], e[1]))

    documents: list[Document] = []
    for repo, path, abspath in entries:
        try:
            size = os.path.getsize(abspath)
            if size > config.max_file_size:
                report.skipped_oversize += 1
                continue
            with open(abspath, "rb") as fh:
                raw = fh.read()
        except OSError:
            report.skipped_unreadable += 1
            continue
        if _looks_binary(raw[:_BINARY_SNIFF_LEN]):
            report.skipped_binary += 1
            continue
        text = raw.decode("utf-8", errors="replace")
        documents.append(
            Document(
                doc_id=len(documents),
                repo=repo,
                path=path,
                language=languages.detect_language(path),
                lines=_split_lines(text),
            )
        )
        report.files_indexed += 1

    docs = tuple(documents)
    index = build_trigram_index(docs) if config.build_index else None
    return Corpus(documents=docs, trigram_index=index, ingest_report=report)


def from_documents(
    docs: list[tuple[str, str, str]], build_index: bool = True
) -> Corpus:
    """Corpus from in-memory (repo, path, text) triples; mainly for tests."""
    ordered = sorted(docs, key=lambda d: (d[0], d[1]))
    documents = tuple(
        Document(
            doc_id=i,
            repo=repo,
            path=path,
            language=languages.detect_language(path),
            lines=_split_lines(text),
        )
        for i, (repo, path, text) in enumerate(ordered)
    )
    index = build_trigram_index(documents) if build_index else None
    return Corpus(documents=documents, trigram_index=index)
