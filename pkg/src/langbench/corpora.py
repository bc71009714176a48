"""Build metadata corpora from annotated records.

Four corpus types are supported, differing in which metadata attributes
feed the detector: titles only (T), titles + abstracts (A), titles +
journal names (J), and greedy (G, everything available). Every corpus is
complete: exactly one document per record, with each included attribute
terminated as a sentence so detectors see clean attribute boundaries.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .records import AnnotatedRecord

# Sentence terminators across scripts; appending "." after "?" or a CJK
# full stop would corrupt the signal.
_TERMINATORS = (".", "!", "?", "。", "！", "？")

_WS_RUN = re.compile(r"\s+")


class CorpusType(str, Enum):
    T = "T"
    A = "A"
    J = "J"
    G = "G"

    def __str__(self) -> str:
        return self.value

    @property
    def complexity(self) -> int:
        """Tie-breaking order, least to most complex: T < J < A < G."""
        return {"T": 0, "J": 1, "A": 2, "G": 3}[self.value]


@dataclass(frozen=True)
class CorpusDocument:
    """The text one detector sees for one record under one corpus type."""

    record_id: str
    corpus_type: CorpusType
    text: str


def terminate_sentence(text: str) -> str:
    """Normalize whitespace and ensure the text ends as a sentence.

    Internal whitespace runs collapse to single spaces; a period is
    appended iff the trimmed text does not already end with a sentence
    terminator. Idempotent.
    """
    cleaned = _WS_RUN.sub(" ", text).strip()
    if not cleaned:
        raise ValueError("cannot terminate empty text")
    if cleaned.endswith(_TERMINATORS):
        return cleaned
    return cleaned + "."


def build_document(record: AnnotatedRecord, corpus_type: CorpusType) -> CorpusDocument:
    """Assemble one document: title, then optionally abstract and journal name."""
    parts = [terminate_sentence(record.title)]
    include_abstract = corpus_type in (CorpusType.A, CorpusType.G)
    include_journal = corpus_type in (CorpusType.J, CorpusType.G)
    if include_abstract and record.abstract and record.abstract.strip():
        parts.append(terminate_sentence(record.abstract))
    if include_journal and record.journal_name and record.journal_name.strip():
        parts.append(terminate_sentence(record.journal_name))
    return CorpusDocument(
        record_id=record.id, corpus_type=corpus_type, text=" ".join(parts)
    )


def build_corpus(records: list, corpus_type: CorpusType) -> list:
    """Build a complete corpus: one document per record, input order kept."""
    if not records:
        raise ValueError("no records to build a corpus from")
    seen = set()
    for r in records:
        if r.id in seen:
            raise ValueError(f"duplicate record id {r.id!r}")
        seen.add(r.id)
    return [build_document(r, corpus_type) for r in records]


def build_all_corpora(records: list) -> dict:
    """Build the four corpora for a record set, keyed by corpus type."""
    return {ct: build_corpus(records, ct) for ct in CorpusType}


def corpus_stats(corpus: list) -> dict:
    """Document count and character-length statistics for a corpus."""
    if not corpus:
        raise ValueError("empty corpus")
    lengths = [len(doc.text) for doc in corpus]
    return {
        "doc_count": len(corpus),
        "mean_chars": sum(lengths) / len(lengths),
        "min_chars": min(lengths),
        "max_chars": max(lengths),
    }


def dump_corpus(corpus: Iterable[CorpusDocument]) -> bytes:
    """Serialize a corpus as JSON Lines for audit/debug."""
    lines = [
        json.dumps(
            {
                "record_id": d.record_id,
                "corpus_type": d.corpus_type.value,
                "text": d.text,
            },
            ensure_ascii=False,
        )
        for d in corpus
    ]
    return ("\n".join(lines) + "\n").encode("utf-8")
