"""Acceptance suite: one test per release criterion.

Each test prints a PASS line on success (run with ``pytest -s`` to see
them); a failure reads as FAIL through the usual pytest report. Stated
tolerances are pinned here and nowhere else.
"""
import json
import math
import random
import sys
import time

import numpy as np
import pytest

from langbench.cli import main
from langbench.corpora import CorpusType
from langbench.detect import (
    CallableDetector,
    DetectorError,
    DetectorRegistry,
    NgramDetector,
    Prediction,
    ProcedureId,
    audit_completeness,
    train_ngram_model,
)
from langbench.evaluate import (
    ConfusionCounts,
    Grouping,
    count_confusions,
    normalize_speeds,
)
from langbench.records import (
    DatabaseWeights,
    LanguageCategory,
    MetadataConfig,
    SubgroupKey,
    load_weights,
)
from langbench.simulate import (
    FWeights,
    SimulationConfig,
    beta_posterior,
    dirichlet_params,
    estimate_mode,
    f_beta_gamma,
    run_simulation,
)

from conftest import SEED_TEXTS, TIMING_FIXTURE, make_record, records_jsonl
from test_evaluate import brute_force_counts, predictions_for


def report(criterion, detail=""):
    print(f"PASS {criterion}" + (f": {detail}" if detail else ""))


def test_c1_f_formula_limits():
    """1. F-formula limits over 1000 random inputs, both identities < 1e-12."""
    rng = np.random.default_rng(11)
    start = time.perf_counter()
    worst_fbeta = worst_harm = 0.0
    for _ in range(1000):
        p, r, s = rng.random(3)
        beta = rng.uniform(0.5, 2.0)
        fb = f_beta_gamma(p, r, s, FWeights(beta, 0))
        oracle_fb = (1 + beta**2) * p * r / (beta**2 * p + r)
        worst_fbeta = max(worst_fbeta, abs(fb - oracle_fb))
        if min(p, r, s) > 0:
            fh = f_beta_gamma(p, r, s, FWeights(1, 1))
            oracle_h = 3 / (1 / p + 1 / r + 1 / s)
            worst_harm = max(worst_harm, abs(fh - oracle_h))
    elapsed = time.perf_counter() - start
    assert worst_fbeta < 1e-12
    assert worst_harm < 1e-12
    assert elapsed < 1.0
    report("criterion 1 (F-formula limits)",
           f"max errs {worst_fbeta:.2e}/{worst_harm:.2e} in {elapsed:.2f}s")


def test_c2_worked_f_value():
    """2. f(0.8, 0.6, 0.5, beta=1, gamma=1) = 0.610169 +/- 1e-6."""
    got = f_beta_gamma(0.8, 0.6, 0.5, FWeights(1, 1))
    assert got == pytest.approx(0.610169, abs=1e-6)
    report("criterion 2 (worked F value)", f"{got:.6f}")


def test_c3_beta_posterior_calibration():
    """3. 100k Beta(51,11) draws: mean +/- 0.005 of 51/62, mode +/- 0.01 of 50/60."""
    start = time.perf_counter()
    post = beta_posterior(50, 10)
    draws = np.random.default_rng(13).beta(post.alpha, post.beta, 100_000)
    mean_err = abs(draws.mean() - 51 / 62)
    mode_err = abs(estimate_mode(draws) - 50 / 60)
    elapsed = time.perf_counter() - start
    assert mean_err < 0.005
    assert mode_err < 0.01
    assert elapsed < 5.0
    report("criterion 3 (Beta calibration)",
           f"mean err {mean_err:.5f}, mode err {mode_err:.5f} in {elapsed:.2f}s")


def test_c4_dirichlet_validity(weights_csv_path):
    """4. Dirichlet over the 48-cell weights fixture: simplex draws, calibrated mean."""
    start = time.perf_counter()
    with open(weights_csv_path, "rb") as fh:
        weights, _ = load_weights(fh)
    alphas_map = dirichlet_params(weights)
    keys = sorted(alphas_map, key=lambda k: (k.language.value, k.config.value))
    assert len(keys) == 48
    alphas = np.array([alphas_map[k] for k in keys], dtype=float)
    draws = np.random.default_rng(14).dirichlet(alphas, size=100_000)
    assert np.all(draws >= 0)
    assert np.max(np.abs(draws.sum(axis=1) - 1.0)) < 1e-9

    k = keys.index(SubgroupKey(LanguageCategory.EN, MetadataConfig.TITLE_ONLY))
    assert alphas[k] == 17_915_166
    total = alphas.sum()
    expected = alphas[k] / total
    var = alphas[k] * (total - alphas[k]) / (total**2 * (total + 1))
    se = math.sqrt(var / 100_000)
    err = abs(draws[:, k].mean() - expected)
    elapsed = time.perf_counter() - start
    assert err < 3 * se
    assert elapsed < 30.0
    report("criterion 4 (Dirichlet validity)",
           f"mean err {err:.2e} < 3*SE {3 * se:.2e} in {elapsed:.1f}s")


def test_c5_confusion_oracle():
    """5. 100 random datasets (<=50 records, <=5 languages) match brute force exactly."""
    rng = random.Random(99)
    langs = ["en", "fr", "de", "ja", "nl"]
    for i in range(100):
        n = rng.randint(1, 50)
        k = rng.randint(1, 5)
        pool = langs[:k]
        records = [
            make_record(
                f"r{i}_{j}",
                f"Title {j}",
                abstract="A." if rng.random() < 0.5 else None,
                journal="J" if rng.random() < 0.5 else None,
                lang=rng.choice(pool),
            )
            for j in range(n)
        ]
        codes = [rng.choice(pool) for _ in range(n)]
        for grouping in Grouping:
            grouped = grouping is Grouping.BY_LANGUAGE_AND_CONFIG
            counts = count_confusions(
                predictions_for(records, codes), records, grouping=grouping
            )
            oracle = brute_force_counts(records, codes, grouped)
            for c in counts:
                assert (c.tp, c.fp, c.fn) == oracle[c.group]
    report("criterion 5 (confusion oracle)", "100 datasets, both groupings")


def test_c6_speed_normalization_fixture():
    """6. Reference timing table: fastest cell scores 1.0, Langdetect/G = 0.07/10.18."""
    table = {(d, CorpusType(ct)): t for (d, ct), t in TIMING_FIXTURE.items()}
    assert len(table) == 28
    scores = normalize_speeds(table)
    assert scores[("FastText", CorpusType.T)] == 1.0
    assert abs(scores[("Langdetect", CorpusType.G)] - 0.07 / 10.18) < 1e-9
    assert all(0 < s <= 1 for s in scores.values())
    report("criterion 6 (speed normalization)",
           f"Langdetect/G = {scores[('Langdetect', CorpusType.G)]:.6f}")


def _planted_inputs():
    """10 000-record synthetic sample, 0.9 per-language accuracy, symmetric confusions."""
    langs = [
        LanguageCategory.EN, LanguageCategory.FR, LanguageCategory.DE,
        LanguageCategory.ES, LanguageCategory.IT,
    ]
    per_lang = 2000
    records = []
    predicted = []
    for li, lang in enumerate(langs):
        for j in range(per_lang):
            rid = f"{lang.value}{j}"
            records.append(make_record(rid, f"Title {rid}", lang=lang.value))
            # every 10th record confused with the next language (cyclic):
            # each language both loses and gains exactly 10% of a class
            if j % 10 == 9:
                predicted.append(langs[(li + 1) % len(langs)].value)
            else:
                predicted.append(lang.value)
    return langs, records, predicted


def test_c7_planted_end_to_end():
    """7. Planted detector at 0.9 accuracy: recall MAP and F(1,0) MAP within 0.02."""
    start = time.perf_counter()
    langs, records, predicted = _planted_inputs()
    procedure = ProcedureId("planted", CorpusType.T)
    predictions = [
        Prediction(record_id=r.id, procedure=procedure, raw_language=code)
        for r, code in zip(records, predicted)
    ]
    counts = count_confusions(predictions, records, grouping=Grouping.BY_LANGUAGE)
    per_lang = {c.group: c for c in counts if c.group in langs}
    for lang in langs:
        assert (per_lang[lang].tp, per_lang[lang].fp, per_lang[lang].fn) == (1800, 200, 200)

    weights = DatabaseWeights(
        {SubgroupKey(lang, MetadataConfig.TITLE_ONLY): 1000 for lang in langs}
    )
    config = SimulationConfig(draws=100_000, seed=7, beta_grid=(1.0,), gamma_set=(0.0,))
    speeds = {("planted", CorpusType.T): 1.0}
    (result,) = run_simulation([procedure], counts, weights, speeds, config)

    # per-language recall MAP: mode of each Beta(1801, 201) posterior
    for lang in langs:
        post = beta_posterior(per_lang[lang].tp, per_lang[lang].fn)
        draws = np.random.default_rng(lang.value.encode()[0]).beta(
            post.alpha, post.beta, 100_000
        )
        assert abs(estimate_mode(draws) - 0.9) < 0.02, lang

    # database-level F(1,0) MAP against the analytic plug-in value
    plug_in = f_beta_gamma(0.9, 0.9, 1.0, FWeights(1, 0))
    assert abs(result.map_estimates[(1.0, 0.0)] - plug_in) < 0.02
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    report("criterion 7 (planted end-to-end)",
           f"F(1,0) MAP {result.map_estimates[(1.0, 0.0)]:.4f} vs {plug_in:.4f} "
           f"in {elapsed:.1f}s")


def test_c8_pipeline_determinism(tmp_path, sample_records, weights_csv_path):
    """8. Two identical full pipeline runs produce byte-identical CSV/JSON artifacts."""
    records_path = tmp_path / "records.jsonl"
    records_path.write_bytes(records_jsonl(sample_records))
    seeds_path = tmp_path / "seeds.json"
    seeds_path.write_text(json.dumps(SEED_TEXTS, ensure_ascii=False))
    timings_path = tmp_path / "timings.csv"
    timings_path.write_text("corpus,ngram-nb\nT,0.10\nA,0.40\nJ,0.20\nG,0.50\n")

    outs = [tmp_path / "run1", tmp_path / "run2"]
    for out in outs:
        assert main([
            "evaluate", "--records", str(records_path),
            "--seed-texts", str(seeds_path), "--timings", str(timings_path),
            "--out", str(out),
        ]) == 0
        assert main([
            "simulate", "--records", str(records_path),
            "--weights", str(weights_csv_path), "--out", str(out),
            "--seed", "42", "--draws", "5000", "--no-plots",
        ]) == 0
    names = sorted(
        p.name for p in outs[0].iterdir() if p.suffix in (".csv", ".json")
    )
    assert len(names) >= 9
    for name in names:
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name
    report("criterion 8 (determinism)", f"{len(names)} artifacts byte-identical")


def test_c9_throughput_budget():
    """9. 28 procedures x 7 beta x 4 gamma x 100k draws, 48 subgroups, <= 10 min."""
    rng = np.random.default_rng(5)
    counts = []
    speeds = {}
    for i in range(7):
        for ct in CorpusType:
            procedure = ProcedureId(f"d{i}", ct)
            speeds[(f"d{i}", ct)] = float(rng.uniform(0.05, 1.0))
            for lang in LanguageCategory:
                for cfg in MetadataConfig:
                    counts.append(ConfusionCounts(
                        procedure, SubgroupKey(lang, cfg),
                        tp=int(rng.integers(0, 200)),
                        fp=int(rng.integers(0, 40)),
                        fn=int(rng.integers(0, 40)),
                    ))
    weights = DatabaseWeights({
        SubgroupKey(lang, cfg): int(rng.integers(10**3, 10**7))
        for lang in LanguageCategory for cfg in MetadataConfig
    })
    procedures = sorted(
        {c.procedure for c in counts},
        key=lambda p: (p.detector, p.corpus_type.complexity),
    )
    config = SimulationConfig(draws=100_000, seed=1)
    start = time.perf_counter()
    results = run_simulation(procedures, counts, weights, speeds, config)
    elapsed = time.perf_counter() - start
    assert len(results) == 28
    assert all(len(r.map_estimates) == 28 for r in results)
    assert elapsed <= 600.0
    report("criterion 9 (throughput)", f"full grid in {elapsed:.1f}s")


def test_c10_procedure_enumeration_and_exclusion(seed_texts, sample_records):
    """10. 7 detectors -> 28 procedures; a failing detector loses exactly its 4."""
    from langbench.corpora import build_all_corpora

    model = train_ngram_model(seed_texts)
    registry = DetectorRegistry()
    for i in range(6):
        registry.register(NgramDetector(name=f"nb{i}", model=model))

    def broken(text):
        raise DetectorError("refuses to predict")

    registry.register(CallableDetector(name="broken", fn=broken))
    procedures = registry.procedures()
    assert len(procedures) == 28

    corpora = build_all_corpora(sample_records)
    surviving = []
    for detector in registry.detectors:
        audit = audit_completeness(detector, corpora)
        if audit["complete"]:
            surviving.extend(
                p for p in procedures if p.detector == detector.name
            )
    assert len(surviving) == 24
    assert not any(p.detector == "broken" for p in surviving)
    report("criterion 10 (enumeration/exclusion)", "28 -> 24 after exclusion")
