"""Benchmark language-identification procedures on bibliographic metadata.

The pipeline: ingest annotated records, build metadata corpora, run
detectors (built-in n-gram Naive Bayes and/or external adapter processes),
compile one-vs-rest confusion counts and normalized speeds, then simulate
database-scale precision, recall, and combined F scores via conjugate
Bayesian posteriors.
"""

from .corpora import (
    CorpusDocument,
    CorpusType,
    build_all_corpora,
    build_corpus,
    corpus_stats,
    terminate_sentence,
)
from .detect import (
    DetectorHandle,
    DetectorRegistry,
    ExternalDetector,
    NgramDetector,
    Prediction,
    ProcedureId,
    audit_completeness,
    run_procedure,
    train_ngram_model,
)
from .evaluate import (
    ConfusionCounts,
    Grouping,
    count_confusions,
    measure_time,
    normalize_speeds,
    point_precision_recall,
)
from .records import (
    AnnotatedRecord,
    DatabaseWeights,
    LanguageCategory,
    MetadataConfig,
    SubgroupKey,
    classify_config,
    ingest_records,
    load_weights,
    map_language,
)
from .simulate import (
    BetaParams,
    FWeights,
    SimulationConfig,
    SimulationResult,
    best_per_algorithm,
    beta_posterior,
    dirichlet_params,
    estimate_mode,
    f_beta_gamma,
    run_simulation,
    simulate_procedure,
)

__version__ = "0.1.0"
