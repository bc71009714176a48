"""Data model and ingestion for annotated bibliographic records.

A record is one sampled article with a manually annotated language. The
language label space is a closed set of 12 categories: the 11 most frequent
languages plus ``other``, which absorbs everything else. Records are further
classified by which optional metadata attributes they carry (abstract,
journal name), yielding 4 metadata configurations and hence 12 x 4 = 48
possible database subgroups.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from enum import Enum
from typing import BinaryIO, Iterable, Optional


class LanguageCategory(str, Enum):
    DE = "de"
    EN = "en"
    ES = "es"
    FR = "fr"
    ID = "id"
    IT = "it"
    JA = "ja"
    KO = "ko"
    PT = "pt"
    RU = "ru"
    ZH = "zh"
    OTHER = "other"

    def __str__(self) -> str:
        return self.value


_NAMED_CODES = {
    c.value: c for c in LanguageCategory if c is not LanguageCategory.OTHER
}


class MetadataConfig(str, Enum):
    TITLE_ONLY = "T"
    TITLE_ABSTRACT = "TA"
    TITLE_JOURNAL = "TJ"
    TITLE_ABSTRACT_JOURNAL = "TAJ"

    def __str__(self) -> str:
        return self.value


class IngestError(ValueError):
    """Malformed or invalid input row; carries the offending line number."""

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


def map_language(raw_code: str) -> LanguageCategory:
    """Map a raw ISO-639-1 code onto the closed 12-category set.

    Case-insensitive for the 11 named codes; any other code collapses
    into ``other``. Total function: never raises for non-empty input.
    """
    return _NAMED_CODES.get(raw_code.strip().lower(), LanguageCategory.OTHER)


def _present(value: Optional[str]) -> bool:
    return value is not None and value.strip() != ""


@dataclass(frozen=True)
class AnnotatedRecord:
    """One sampled article with its manually annotated true language."""

    id: str
    title: str
    abstract: Optional[str]
    journal_name: Optional[str]
    true_language: LanguageCategory
    raw_language_code: Optional[str] = None

    def __post_init__(self):
        if not self.title or not self.title.strip():
            raise ValueError(f"record {self.id!r}: title is empty")
        if not isinstance(self.true_language, LanguageCategory):
            raise ValueError(
                f"record {self.id!r}: invalid language {self.true_language!r}"
            )


def classify_config(record: AnnotatedRecord) -> MetadataConfig:
    """Classify a record by which optional attributes it actually carries.

    Whitespace-only attributes count as absent: they carry no language
    signal and would poison corpus construction.
    """
    has_abstract = _present(record.abstract)
    has_journal = _present(record.journal_name)
    if has_abstract and has_journal:
        return MetadataConfig.TITLE_ABSTRACT_JOURNAL
    if has_abstract:
        return MetadataConfig.TITLE_ABSTRACT
    if has_journal:
        return MetadataConfig.TITLE_JOURNAL
    return MetadataConfig.TITLE_ONLY


@dataclass(frozen=True)
class SubgroupKey:
    """A (language, metadata configuration) cell of the database."""

    language: LanguageCategory
    config: MetadataConfig


ALL_SUBGROUPS = tuple(
    SubgroupKey(lang, cfg) for lang in LanguageCategory for cfg in MetadataConfig
)


@dataclass(frozen=True)
class DatabaseWeights:
    """Database-level article counts per subgroup (the mixture weights)."""

    counts: dict

    def __post_init__(self):
        if not self.counts:
            raise ValueError("weights are empty")
        for key, n in self.counts.items():
            if n < 0:
                raise ValueError(f"negative count for {key}")
        if all(n == 0 for n in self.counts.values()):
            raise ValueError("all weights are zero")

    def by_language(self) -> dict:
        """Collapse subgroup counts to per-language totals."""
        totals: dict = {}
        for key, n in self.counts.items():
            totals[key.language] = totals.get(key.language, 0) + n
        return totals


_RECORD_FIELDS = ("id", "title", "abstract", "journal_name", "true_language")


def _decode_lines(source: BinaryIO) -> Iterable[str]:
    wrapper = io.TextIOWrapper(source, encoding="utf-8", errors="strict")
    return wrapper


def _build_record(fields: dict, line_no: int) -> AnnotatedRecord:
    missing = [f for f in ("id", "title", "true_language") if not fields.get(f)]
    if missing:
        raise IngestError(line_no, f"missing field(s): {', '.join(missing)}")
    title = fields["title"]
    if not str(title).strip():
        raise IngestError(line_no, f"record {fields['id']!r}: empty title")
    raw = str(fields["true_language"])

    def opt(value):
        if value is None:
            return None
        value = str(value)
        return value if value != "" else None

    return AnnotatedRecord(
        id=str(fields["id"]),
        title=str(title),
        abstract=opt(fields.get("abstract")),
        journal_name=opt(fields.get("journal_name")),
        true_language=map_language(raw),
        raw_language_code=raw,
    )


def ingest_records(source: BinaryIO, format: str = "jsonl") -> list:
    """Parse annotated records from a JSON Lines or CSV byte stream.

    Records are returned in input order. Any malformed line or invariant
    violation raises :class:`IngestError` naming the line.
    """
    if format not in ("jsonl", "csv"):
        raise ValueError(f"unknown format {format!r}")
    try:
        text = _decode_lines(source)
        if format == "jsonl":
            return _ingest_jsonl(text)
        return _ingest_csv(text)
    except UnicodeDecodeError as exc:
        raise IngestError(0, f"input is not valid UTF-8: {exc}") from exc


def _ingest_jsonl(lines: Iterable[str]) -> list:
    records = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(line_no, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise IngestError(line_no, "expected a JSON object")
        records.append(_build_record(obj, line_no))
    return records


def _ingest_csv(text: Iterable[str]) -> list:
    reader = csv.DictReader(text)
    if reader.fieldnames is None:
        raise IngestError(1, "missing CSV header")
    unknown = set(reader.fieldnames) - set(_RECORD_FIELDS)
    if unknown:
        raise IngestError(1, f"unexpected column(s): {sorted(unknown)}")
    records = []
    for row_no, row in enumerate(reader, start=2):
        records.append(_build_record(row, row_no))
    return records


def serialize_records(records: Iterable[AnnotatedRecord]) -> bytes:
    """Dump records as JSON Lines; inverse of jsonl ingestion."""
    lines = []
    for r in records:
        lines.append(
            json.dumps(
                {
                    "id": r.id,
                    "title": r.title,
                    "abstract": r.abstract,
                    "journal_name": r.journal_name,
                    "true_language": r.raw_language_code or r.true_language.value,
                },
                ensure_ascii=False,
            )
        )
    return ("\n".join(lines) + "\n").encode("utf-8")


_CATEGORY_LABELS = {c.value: c for c in LanguageCategory}
_CONFIG_LABELS = {c.value: c for c in MetadataConfig}


def load_weights(source: BinaryIO) -> tuple:
    """Load database subgroup weights from a ``language,config,count`` CSV.

    Rows whose language label is outside the 12 categories (e.g. a bucket
    of linguistically unclassified articles) are dropped; the number of
    dropped rows is returned alongside the weights. The simulation needs a
    confusion submatrix per subgroup, and those only exist for annotated
    categories.

    Returns ``(DatabaseWeights, dropped_row_count)``.
    """
    text = _decode_lines(source)
    reader = csv.DictReader(text)
    expected = {"language", "config", "count"}
    if reader.fieldnames is None or set(reader.fieldnames) != expected:
        raise IngestError(1, "expected header: language,config,count")
    counts: dict = {}
    dropped = 0
    for row_no, row in enumerate(reader, start=2):
        label = row["language"].strip()
        if label not in _CATEGORY_LABELS:
            dropped += 1
            continue
        cfg_label = row["config"].strip()
        if cfg_label not in _CONFIG_LABELS:
            raise IngestError(row_no, f"unknown config {cfg_label!r}")
        try:
            n = int(row["count"].replace(" ", "").replace(" ", ""))
        except ValueError as exc:
            raise IngestError(row_no, f"bad count {row['count']!r}") from exc
        if n < 0:
            raise IngestError(row_no, f"negative count {n}")
        key = SubgroupKey(_CATEGORY_LABELS[label], _CONFIG_LABELS[cfg_label])
        if key in counts:
            raise IngestError(
                row_no, f"duplicate key ({label}, {cfg_label})"
            )
        counts[key] = n
    return DatabaseWeights(counts=counts), dropped
