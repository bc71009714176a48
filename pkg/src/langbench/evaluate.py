"""One-vs-rest confusion counting, point precision/recall, and timing.

Confusion counts are compiled per procedure and group, where a group is
either a language category or a (language, metadata configuration)
subgroup. Processing times are single wall-clock measurements by default
and normalized so the globally fastest procedure scores exactly 1.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from .corpora import CorpusType
from .detect import DetectorHandle, ProcedureId, run_procedure
from .records import (
    AnnotatedRecord,
    LanguageCategory,
    MetadataConfig,
    SubgroupKey,
    classify_config,
    map_language,
)


class Grouping(str, Enum):
    BY_LANGUAGE = "by_language"
    BY_LANGUAGE_AND_CONFIG = "by_language_and_config"


@dataclass(frozen=True)
class ConfusionCounts:
    procedure: ProcedureId
    group: Union[SubgroupKey, LanguageCategory]
    tp: int
    fp: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def language(self) -> LanguageCategory:
        if isinstance(self.group, SubgroupKey):
            return self.group.language
        return self.group

    @property
    def config(self) -> Optional[MetadataConfig]:
        if isinstance(self.group, SubgroupKey):
            return self.group.config
        return None


def count_confusions(
    predictions: list,
    records: list,
    grouping: Grouping = Grouping.BY_LANGUAGE_AND_CONFIG,
) -> list:
    """Compile one-vs-rest TP/FP/FN counts per group for one procedure.

    Every group of the full grid is emitted, zero counts included, so the
    downstream posteriors always have a (possibly pure-prior) submatrix.
    """
    by_id = {r.id: r for r in records}
    if len(by_id) != len(records):
        raise ValueError("duplicate record ids")
    pred_ids = {p.record_id for p in predictions}
    if pred_ids != set(by_id):
        missing = set(by_id) - pred_ids
        extra = pred_ids - set(by_id)
        raise ValueError(
            f"predictions do not cover records (missing={sorted(missing)[:5]}, "
            f"unmatched={sorted(extra)[:5]})"
        )
    if len(predictions) != len(records):
        raise ValueError("duplicate predictions")

    procedure = predictions[0].procedure
    grouped = grouping is Grouping.BY_LANGUAGE_AND_CONFIG

    tallies: dict = {}

    def bump(language, config, slot):
        key = (language, config)
        if key not in tallies:
            tallies[key] = {"tp": 0, "fp": 0, "fn": 0}
        tallies[key][slot] += 1

    for pred in predictions:
        record = by_id[pred.record_id]
        true_lang = record.true_language
        pred_lang = map_language(pred.raw_language)
        config = classify_config(record) if grouped else None
        if pred_lang == true_lang:
            bump(true_lang, config, "tp")
        else:
            bump(true_lang, config, "fn")
            bump(pred_lang, config, "fp")

    counts = []
    configs = list(MetadataConfig) if grouped else [None]
    for language in LanguageCategory:
        for config in configs:
            cell = tallies.get((language, config), {"tp": 0, "fp": 0, "fn": 0})
            group = SubgroupKey(language, config) if grouped else language
            counts.append(
                ConfusionCounts(
                    procedure=procedure,
                    group=group,
                    tp=cell["tp"],
                    fp=cell["fp"],
                    fn=cell["fn"],
                )
            )
    return counts


def point_precision_recall(counts: ConfusionCounts) -> tuple:
    """(precision, recall); a zero denominator yields None, not 0."""
    precision = (
        counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp > 0 else None
    )
    recall = (
        counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn > 0 else None
    )
    return precision, recall


def measure_time(detector: DetectorHandle, corpus: list, repeats: int = 1) -> float:
    """Minimum wall-clock seconds over ``repeats`` full detection runs.

    The default single run replicates a one-shot measurement protocol;
    higher repeats reduce scheduler noise.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    if not corpus:
        raise ValueError("empty corpus")
    times = []
    for _ in range(repeats):
        _, elapsed = run_procedure(detector, corpus)
        times.append(elapsed)
    return min(times)


def normalize_speeds(table: dict) -> dict:
    """Rescale a timing table to (0, 1] speed scores.

    score = t_min / t, so the globally fastest procedure scores exactly
    1.0 and slower procedures score proportionally less. (A literal
    t / t_min rescaling would exceed 1 and invert the ordering a
    harmonic aggregation needs.)
    """
    if not table:
        raise ValueError("empty timing table")
    for key, t in table.items():
        if t <= 0:
            raise ValueError(f"non-positive time for {key}: {t}")
    t_min = min(table.values())
    return {key: t_min / t for key, t in table.items()}


# --- CSV artifacts -----------------------------------------------------------

CONFUSION_HEADER = [
    "procedure",
    "detector",
    "corpus",
    "language",
    "config",
    "tp",
    "fp",
    "fn",
]


def write_confusion_csv(counts: list) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CONFUSION_HEADER)
    for c in counts:
        writer.writerow(
            [
                str(c.procedure),
                c.procedure.detector,
                c.procedure.corpus_type.value,
                c.language.value,
                c.config.value if c.config is not None else "",
                c.tp,
                c.fp,
                c.fn,
            ]
        )
    return out.getvalue()


def read_confusion_csv(text: str) -> list:
    reader = csv.DictReader(io.StringIO(text))
    counts = []
    for row in reader:
        procedure = ProcedureId(
            detector=row["detector"], corpus_type=CorpusType(row["corpus"])
        )
        language = LanguageCategory(row["language"])
        if row["config"]:
            group: Union[SubgroupKey, LanguageCategory] = SubgroupKey(
                language, MetadataConfig(row["config"])
            )
        else:
            group = language
        counts.append(
            ConfusionCounts(
                procedure=procedure,
                group=group,
                tp=int(row["tp"]),
                fp=int(row["fp"]),
                fn=int(row["fn"]),
            )
        )
    return counts


def write_timing_csv(table: dict) -> str:
    """Timing table as CSV: rows = corpus type, columns = detector."""
    detectors = sorted({detector for detector, _ in table})
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["corpus"] + detectors)
    for ct in CorpusType:
        row = [ct.value]
        for d in detectors:
            t = table.get((d, ct))
            row.append(f"{t:.2f}" if t is not None else "")
        writer.writerow(row)
    return out.getvalue()


def read_timing_csv(text: str) -> dict:
    """Parse the corpus-by-detector timing layout back into a table."""
    reader = csv.DictReader(io.StringIO(text))
    table = {}
    for row in reader:
        ct = CorpusType(row["corpus"])
        for detector, value in row.items():
            if detector == "corpus" or value in (None, ""):
                continue
            table[(detector, ct)] = float(value)
    return table


def write_speed_csv(scores: dict) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["detector", "corpus", "speed_score"])
    for (detector, ct), s in sorted(
        scores.items(), key=lambda kv: (kv[0][0], kv[0][1].complexity)
    ):
        writer.writerow([detector, ct.value, repr(s)])
    return out.getvalue()


def read_speed_csv(text: str) -> dict:
    reader = csv.DictReader(io.StringIO(text))
    return {
        (row["detector"], CorpusType(row["corpus"])): float(row["speed_score"])
        for row in reader
    }
