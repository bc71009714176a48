"""Train the built-in n-gram detector and evaluate it as four procedures.

A procedure is a (detector, corpus type) pair. This demo trains the
character n-gram Naive Bayes detector on a few seed texts, runs it over
all four corpus views of a small annotated sample, and compiles
one-vs-rest confusion counts, point precision/recall, and normalized
speed scores.
"""
from langbench import (
    AnnotatedRecord,
    CorpusType,
    Grouping,
    LanguageCategory,
    NgramDetector,
    build_all_corpora,
    count_confusions,
    measure_time,
    normalize_speeds,
    point_precision_recall,
    run_procedure,
    train_ngram_model,
)

SEED_TEXTS = {
    "en": [
        "The structure of scientific revolutions and the growth of knowledge.",
        "An analysis of measurement error in large survey data sets.",
        "Machine learning methods for text classification and retrieval.",
    ],
    "fr": [
        "La structure des révolutions scientifiques et la croissance du savoir.",
        "Une analyse des erreurs de mesure dans les grandes enquêtes.",
        "Méthodes d'apprentissage automatique pour la classification de textes.",
    ],
    "de": [
        "Die Struktur wissenschaftlicher Revolutionen und das Wachstum des Wissens.",
        "Eine Analyse von Messfehlern in großen Umfragedatensätzen.",
        "Maschinelle Lernverfahren für die Klassifikation von Texten.",
    ],
}

records = [
    AnnotatedRecord("r1", "Knowledge growth in scientific communities",
                    "A study of citation networks", "Scientometrics",
                    LanguageCategory.EN),
    AnnotatedRecord("r2", "Classification automatique de textes scientifiques",
                    None, "Revue française de statistique", LanguageCategory.FR),
    AnnotatedRecord("r3", "Messfehler in Umfragedaten",
                    "Eine systematische Analyse", None, LanguageCategory.DE),
    AnnotatedRecord("r4", "Text retrieval and survey measurement",
                    None, None, LanguageCategory.EN),
]

model = train_ngram_model(SEED_TEXTS)
detector = NgramDetector(name="ngram-nb", model=model)
corpora = build_all_corpora(records)

print("Point precision/recall per procedure (grouped by language):")
timings = {}
for corpus_type in sorted(CorpusType, key=lambda ct: ct.complexity):
    corpus = corpora[corpus_type]
    predictions, _ = run_procedure(detector, corpus)
    timings[(detector.name, corpus_type)] = measure_time(
        detector, corpus, repeats=3
    )
    counts = count_confusions(predictions, records, grouping=Grouping.BY_LANGUAGE)
    print(f"  procedure {detector.name}/{corpus_type.value}:")
    for c in counts:
        if c.tp + c.fp + c.fn == 0:
            continue  # language absent from this tiny sample
        precision, recall = point_precision_recall(c)
        fmt = lambda v: "undefined" if v is None else f"{v:.2f}"
        print(
            f"    {c.language.value}: tp={c.tp} fp={c.fp} fn={c.fn} "
            f"P={fmt(precision)} R={fmt(recall)}"
        )

print("\nNormalized speed scores (fastest procedure scores exactly 1.0):")
for (name, corpus_type), score in sorted(
    normalize_speeds(timings).items(), key=lambda kv: -kv[1]
):
    print(f"  {name}/{corpus_type.value}: {score:.3f}")
