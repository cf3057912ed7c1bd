"""Versioned binary snapshots of a searchable corpus.

Layout (all integers little-endian u32, strings length-prefixed UTF-8):

    magic  b"SSIX"
    u32    format version (currently 1)
    u32    document count
    per document: repo, path, language, u32 line count, lines...
    u32    trigram count
    per trigram (sorted by key bytes): 3 raw bytes, u32 posting count,
           posting doc ids ascending

The writer is fully deterministic: identical corpora produce byte-identical
snapshot files.
"""

from __future__ import annotations

import struct
from typing import BinaryIO

from .corpus import Corpus, Document

MAGIC = b"SSIX"
FORMAT_VERSION = 1


class SnapshotError(ValueError):
    pass


def _write_str(out: BinaryIO, text: str) -> None:
    data = text.encode("utf-8")
    out.write(struct.pack("<I", len(data)))
    out.write(data)


def save(corpus: Corpus, path: str) -> None:
    if corpus.trigram_index is None:
        raise SnapshotError("refusing to snapshot a corpus without a trigram index")
    with open(path, "wb") as out:
        out.write(MAGIC)
        out.write(struct.pack("<I", FORMAT_VERSION))
        out.write(struct.pack("<I", len(corpus.documents)))
        for doc in corpus.documents:
            _write_str(out, doc.repo)
            _write_str(out, doc.path)
            _write_str(out, doc.language)
            out.write(struct.pack("<I", len(doc.lines)))
            for line in doc.lines:
                _write_str(out, line)
        grams = sorted(corpus.trigram_index.items())
        out.write(struct.pack("<I", len(grams)))
        for gram, ids in grams:
            if len(gram) != 3:
                raise SnapshotError(f"bad trigram key of length {len(gram)}")
            out.write(gram)
            ordered = sorted(ids)
            out.write(struct.pack("<I", len(ordered)))
            out.write(struct.pack(f"<{len(ordered)}I", *ordered))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise SnapshotError("snapshot truncated")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def string(self) -> str:
        return self.take(self.u32()).decode("utf-8")


def load(path: str) -> Corpus:
    with open(path, "rb") as fh:
        data = fh.read()
    r = _Reader(data)
    if r.take(4) != MAGIC:
        raise SnapshotError(f"not a snapshot file: {path}")
    version = r.u32()
    if version != FORMAT_VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    doc_count = r.u32()
    documents = []
    for doc_id in range(doc_count):
        repo = r.string()
        doc_path = r.string()
        language = r.string()
        line_count = r.u32()
        lines = tuple(r.string() for _ in range(line_count))
        documents.append(Document(doc_id, repo, doc_path, language, lines))
    gram_count = r.u32()
    index: dict[bytes, frozenset[int]] = {}
    for _ in range(gram_count):
        gram = r.take(3)
        posting_count = r.u32()
        ids = struct.unpack(f"<{posting_count}I", r.take(4 * posting_count))
        index[gram] = frozenset(ids)
    if r.pos != len(data):
        raise SnapshotError("trailing bytes after snapshot payload")
    return Corpus(documents=tuple(documents), trigram_index=index)
