"""Build the four corpus variants from a handful of bibliographic records.

Each annotated record carries a title and, optionally, an abstract and a
journal name. A detector never sees the record directly; it sees one of
four corpus views:

  T  titles only
  J  titles + journal names
  A  titles + abstracts
  G  greedy: everything available

Sentence termination keeps the concatenated fields from bleeding into each
other, which matters to sentence-aware detectors.
"""
from langbench import (
    AnnotatedRecord,
    CorpusType,
    LanguageCategory,
    build_all_corpora,
    classify_config,
    corpus_stats,
)

records = [
    AnnotatedRecord(
        id="a1",
        title="Deep learning for protein folding",
        abstract="We present a neural approach to structure prediction",
        journal_name="Journal of Computational Biology",
        true_language=LanguageCategory.EN,
    ),
    AnnotatedRecord(
        id="a2",
        title="Sur la stabilité des équations différentielles",
        abstract=None,
        journal_name="Comptes Rendus Mathématique",
        true_language=LanguageCategory.FR,
    ),
    AnnotatedRecord(
        id="a3",
        title="固体物理学における量子効果",  # CJK terminator handling
        abstract=None,
        journal_name=None,
        true_language=LanguageCategory.JA,
    ),
]

print("Metadata configuration of each record (which fields it has):")
for record in records:
    print(f"  {record.id}: {classify_config(record).value}")

corpora = build_all_corpora(records)

print("\nThe four corpus views of record a1:")
for corpus_type in CorpusType:
    doc = next(d for d in corpora[corpus_type] if d.record_id == "a1")
    print(f"  {corpus_type.value}: {doc.text}")

print("\nPer-corpus statistics:")
for corpus_type in sorted(CorpusType, key=lambda ct: ct.complexity):
    stats = corpus_stats(corpora[corpus_type])
    print(
        f"  {corpus_type.value} (complexity {corpus_type.complexity}): "
        f"{stats['doc_count']} docs, mean {stats['mean_chars']:.1f} chars"
    )
