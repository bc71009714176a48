import json
from pathlib import Path

import pytest

from langbench.records import AnnotatedRecord, LanguageCategory, map_language

DATA_DIR = Path(__file__).parent / "data"

# Reference timing table: 7 detectors x 4 corpus types, in seconds.
TIMING_FIXTURE = {
    ("CLD2", "T"): 0.07, ("CLD3", "T"): 0.20, ("DetectLanguage", "T"): 2.78,
    ("FastSpell", "T"): 0.07, ("FastText", "T"): 0.07, ("LangID", "T"): 3.82,
    ("Langdetect", "T"): 8.96,
    ("CLD2", "A"): 0.19, ("CLD3", "A"): 0.40, ("DetectLanguage", "A"): 3.62,
    ("FastSpell", "A"): 0.15, ("FastText", "A"): 0.14, ("LangID", "A"): 5.99,
    ("Langdetect", "A"): 10.15,
    ("CLD2", "J"): 0.07, ("CLD3", "J"): 0.24, ("DetectLanguage", "J"): 2.74,
    ("FastSpell", "J"): 0.08, ("FastText", "J"): 0.07, ("LangID", "J"): 3.90,
    ("Langdetect", "J"): 8.94,
    ("CLD2", "G"): 0.13, ("CLD3", "G"): 0.45, ("DetectLanguage", "G"): 3.93,
    ("FastSpell", "G"): 0.16, ("FastText", "G"): 0.16, ("LangID", "G"): 4.91,
    ("Langdetect", "G"): 10.18,
}

# Tiny multilingual seed corpus for the builtin n-gram detector. Disjoint
# enough across scripts/diacritics that the detector separates them.
SEED_TEXTS = {
    "en": [
        "the quick brown fox jumps over the lazy dog and the cat",
        "a study of the effects of learning on the brain and behavior",
        "this is an english sentence about science and research methods",
    ],
    "fr": [
        "le renard brun saute par dessus le chien paresseux et le chat",
        "une étude des effets de l'apprentissage sur le cerveau",
        "ceci est une phrase française sur la science et la recherche",
    ],
    "de": [
        "der schnelle braune fuchs springt über den faulen hund",
        "eine studie über die auswirkungen des lernens auf das gehirn",
        "dies ist ein deutscher satz über wissenschaft und forschung",
    ],
    "ja": [
        "これは科学と研究方法についての日本語の文章です",
        "学習が脳と行動に及ぼす影響についての研究",
        "素早い茶色の狐は怠け者の犬を飛び越える",
    ],
}


@pytest.fixture
def seed_texts():
    return SEED_TEXTS


@pytest.fixture
def weights_csv_path():
    return DATA_DIR / "database_weights.csv"


def make_record(rid, title, abstract=None, journal=None, lang="en"):
    return AnnotatedRecord(
        id=rid,
        title=title,
        abstract=abstract,
        journal_name=journal,
        true_language=map_language(lang),
        raw_language_code=lang,
    )


@pytest.fixture
def sample_records():
    return [
        make_record("r1", "A study of the brain", "We study the brain. It is large.",
                    "Journal of Brains", "en"),
        make_record("r2", "Une étude du cerveau", None, "Revue du Cerveau", "fr"),
        make_record("r3", "Eine Studie über das Gehirn",
                    "Wir untersuchen das Gehirn.", None, "de"),
        make_record("r4", "脳についての研究", None, None, "ja"),
        make_record("r5", "The lazy dog and the quick fox", None, None, "en"),
    ]


def records_jsonl(records):
    lines = []
    for r in records:
        lines.append(json.dumps({
            "id": r.id, "title": r.title, "abstract": r.abstract,
            "journal_name": r.journal_name,
            "true_language": r.raw_language_code or r.true_language.value,
        }, ensure_ascii=False))
    return ("\n".join(lines) + "\n").encode("utf-8")
