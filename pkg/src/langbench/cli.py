"""Command-line surface: ``langbench evaluate`` and ``langbench simulate``.

``evaluate`` ingests annotated records, builds the four corpora, runs every
registered detector over each of them (excluding detectors that fail the
completeness audit), and writes prediction, confusion, timing, and speed
artifacts. ``simulate`` consumes those artifacts plus a database weights
file and writes MAP score tables, best-procedure tables, and optional SVG
plots.

Exit statuses: 0 success, 1 usage error, 2 input/validation error,
3 detector/protocol error, 4 internal error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import corpora, evaluate, records, simulate
from .corpora import CorpusType
from .detect import (
    DetectorError,
    DetectorRegistry,
    ExternalDetector,
    NgramDetector,
    ProcedureId,
    audit_completeness,
    run_procedure,
    train_ngram_model,
)
from .records import LanguageCategory, map_language
from .simulate import FWeights, SimulationConfig

log = logging.getLogger("langbench")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    records_path: str
    out_dir: str
    weights_path: Optional[str] = None
    timings_path: Optional[str] = None
    seed_texts_path: Optional[str] = None
    builtin_name: str = "ngram-nb"
    adapters: dict = field(default_factory=dict)
    seed: int = 0
    draws: int = simulate.DEFAULT_DRAWS
    beta_grid: tuple = simulate.DEFAULT_BETA_GRID
    gamma_set: tuple = simulate.DEFAULT_GAMMA_SET
    mixture_mode: str = "weighted_sum"
    grouping: evaluate.Grouping = evaluate.Grouping.BY_LANGUAGE_AND_CONFIG
    repeats: int = 1
    plots: bool = True

    def simulation_config(self) -> SimulationConfig:
        return SimulationConfig(
            draws=self.draws,
            seed=self.seed,
            beta_grid=tuple(self.beta_grid),
            gamma_set=tuple(self.gamma_set),
            mixture_mode=self.mixture_mode,
        )


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_text(path: Path, text: str) -> None:
    _atomic_write(path, text.encode("utf-8"))


def _build_registry(config: RunConfig) -> DetectorRegistry:
    registry = DetectorRegistry()
    if config.seed_texts_path:
        with open(config.seed_texts_path, "r", encoding="utf-8") as fh:
            seeds = json.load(fh)
        seeds = {
            lang: texts if isinstance(texts, list) else [texts]
            for lang, texts in seeds.items()
        }
        model = train_ngram_model(seeds)
        registry.register(NgramDetector(name=config.builtin_name, model=model))
    for name, command in config.adapters.items():
        registry.register(ExternalDetector(name=name, command=command))
    if not registry.detectors:
        raise UsageError("no detectors configured (need --seed-texts and/or --adapter)")
    return registry


def _load_records(config: RunConfig) -> list:
    fmt = "csv" if config.records_path.endswith(".csv") else "jsonl"
    with open(config.records_path, "rb") as fh:
        return records.ingest_records(fh, format=fmt)


def cmd_evaluate(config: RunConfig) -> None:
    sample = _load_records(config)
    all_corpora = corpora.build_all_corpora(sample)
    registry = _build_registry(config)
    out = Path(config.out_dir)

    stats_rows = io.StringIO()
    writer = csv.writer(stats_rows, lineterminator="\n")
    writer.writerow(["corpus", "doc_count", "mean_chars", "min_chars", "max_chars"])
    for ct in CorpusType:
        s = corpora.corpus_stats(all_corpora[ct])
        writer.writerow(
            [ct.value, s["doc_count"], repr(s["mean_chars"]), s["min_chars"], s["max_chars"]]
        )
    _write_text(out / "corpus_stats.csv", stats_rows.getvalue())

    # Completeness audit: incomplete detectors lose all their procedures.
    excluded_rows = []
    complete = []
    for detector in registry.detectors:
        audit = audit_completeness(detector, all_corpora)
        if audit["complete"]:
            complete.append(detector)
        else:
            for failure in audit["failures"]:
                log.warning(
                    "excluding detector %s: corpus %s, record %s: %s",
                    detector.name,
                    failure["corpus_type"],
                    failure["record_id"],
                    failure["reason"],
                )
                excluded_rows.append(
                    [
                        detector.name,
                        failure["corpus_type"].value,
                        failure["record_id"] or "",
                        failure["reason"],
                    ]
                )
    if excluded_rows:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["detector", "corpus", "record_id", "reason"])
        writer.writerows(excluded_rows)
        _write_text(out / "exclusions.csv", buf.getvalue())
    if not complete:
        raise DetectorError("every configured detector failed the completeness audit")

    # Recorded times may be supplied as a fixture (a timing table is a
    # one-shot environment snapshot; reruns cannot reproduce wall clock
    # byte for byte, so determinism-sensitive runs pin it as data).
    fixed_timings = None
    if config.timings_path:
        fixed_timings = evaluate.read_timing_csv(
            Path(config.timings_path).read_text(encoding="utf-8")
        )

    all_counts = []
    timing_table = {}
    for detector in complete:
        for ct in CorpusType:
            corpus = all_corpora[ct]
            predictions, elapsed = run_procedure(detector, corpus)
            if config.repeats > 1:
                for _ in range(config.repeats - 1):
                    _, t = run_procedure(detector, corpus)
                    elapsed = min(elapsed, t)
            if fixed_timings is not None:
                if (detector.name, ct) not in fixed_timings:
                    raise UsageError(
                        f"timings file lacks ({detector.name}, {ct.value})"
                    )
                elapsed = fixed_timings[(detector.name, ct)]
            timing_table[(detector.name, ct)] = elapsed

            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["record_id", "language", "raw_language", "confidence"])
            for p in predictions:
                writer.writerow(
                    [
                        p.record_id,
                        map_language(p.raw_language).value,
                        p.raw_language,
                        repr(p.confidence) if p.confidence is not None else "",
                    ]
                )
            _write_text(out / f"predictions_{detector.name}_{ct.value}.csv", buf.getvalue())

            all_counts.extend(
                evaluate.count_confusions(predictions, sample, grouping=config.grouping)
            )

    _write_text(out / "confusion.csv", evaluate.write_confusion_csv(all_counts))
    _write_text(out / "timings.csv", evaluate.write_timing_csv(timing_table))
    speeds = evaluate.normalize_speeds(timing_table)
    _write_text(out / "speed_scores.csv", evaluate.write_speed_csv(speeds))


def cmd_simulate(config: RunConfig) -> None:
    out = Path(config.out_dir)
    confusion_path = out / "confusion.csv"
    speeds_path = out / "speed_scores.csv"
    if not confusion_path.exists() or not speeds_path.exists():
        raise UsageError(
            f"missing evaluation artifacts in {out}; run `langbench evaluate` first"
        )
    if not config.weights_path:
        raise UsageError("simulate requires --weights")

    counts = evaluate.read_confusion_csv(confusion_path.read_text(encoding="utf-8"))
    speeds = evaluate.read_speed_csv(speeds_path.read_text(encoding="utf-8"))
    with open(config.weights_path, "rb") as fh:
        weights, dropped = records.load_weights(fh)
    if dropped:
        log.warning("dropped %d weight row(s) with unmapped language labels", dropped)

    procedures = sorted(
        {c.procedure for c in counts},
        key=lambda p: (p.detector, p.corpus_type.complexity),
    )
    sim_config = config.simulation_config()
    results = simulate.run_simulation(procedures, counts, weights, speeds, sim_config)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["detector", "corpus", "beta", "gamma", "map_estimate"])
    for result in results:
        for (beta, gamma), value in sorted(result.map_estimates.items()):
            writer.writerow(
                [
                    result.procedure.detector,
                    result.procedure.corpus_type.value,
                    repr(beta),
                    repr(gamma),
                    repr(value),
                ]
            )
    _write_text(out / "map_estimates.csv", buf.getvalue())

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["beta", "gamma", "detector", "corpus", "map_estimate"])
    for beta in sim_config.beta_grid:
        for gamma in sim_config.gamma_set:
            best = simulate.best_per_algorithm(results, FWeights(beta=beta, gamma=gamma))
            for detector in sorted(best):
                procedure, value = best[detector]
                writer.writerow(
                    [repr(beta), repr(gamma), detector, procedure.corpus_type.value, repr(value)]
                )
    _write_text(out / "best_procedures.csv", buf.getvalue())

    summary = {
        "seed": sim_config.seed,
        "draws": sim_config.draws,
        "beta_grid": list(sim_config.beta_grid),
        "gamma_set": list(sim_config.gamma_set),
        "mixture_mode": sim_config.mixture_mode,
        "grouping": config.grouping.value,
        "procedures": [str(p) for p in procedures],
        "dropped_weight_rows": dropped,
    }
    _write_text(out / "summary.json", json.dumps(summary, indent=2) + "\n")

    if config.plots:
        _emit_plots(out, counts, speeds, results, sim_config)


def select_plot_procedures(per_language: list) -> set:
    """Filter dominated procedures for the precision/recall scatter.

    ``per_language`` holds (procedure, language, precision, recall)
    entries; per (detector, language) only the precision-best and
    recall-best procedures survive. Ties prefer the other measure, then
    the simpler corpus (T < J < A < G); a procedure best on both measures
    is kept alone.
    """
    grouped: dict = {}
    for procedure, language, p, r in per_language:
        grouped.setdefault((procedure.detector, language), []).append(
            (procedure, p if p is not None else -1.0, r if r is not None else -1.0)
        )
    kept = set()
    for (detector, language), entries in grouped.items():
        prec_best = min(
            entries, key=lambda e: (-e[1], -e[2], e[0].corpus_type.complexity)
        )[0]
        rec_best = min(
            entries, key=lambda e: (-e[2], -e[1], e[0].corpus_type.complexity)
        )[0]
        kept.add((prec_best, language))
        kept.add((rec_best, language))
    return kept


def _per_language_points(counts: list) -> list:
    """Point precision/recall per (procedure, language), collapsing configs."""
    agg: dict = {}
    for c in counts:
        key = (c.procedure, c.language)
        cell = agg.setdefault(key, {"tp": 0, "fp": 0, "fn": 0})
        cell["tp"] += c.tp
        cell["fp"] += c.fp
        cell["fn"] += c.fn
    points = []
    for (procedure, language), cell in agg.items():
        merged = evaluate.ConfusionCounts(
            procedure=procedure, group=language, tp=cell["tp"], fp=cell["fp"], fn=cell["fn"]
        )
        p, r = evaluate.point_precision_recall(merged)
        points.append((procedure, language, p, r))
    return points


def _emit_plots(out: Path, counts, speeds, results, sim_config) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    def save(fig, name):
        path = out / name
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)

    # Precision/recall scatter per language, dominated procedures filtered.
    points = _per_language_points(counts)
    kept = select_plot_procedures(points)
    fig, axes = plt.subplots(3, 4, figsize=(16, 10), sharex=True, sharey=True)
    languages = list(LanguageCategory)
    detectors = sorted({p.detector for p, *_ in points})
    cmap = plt.get_cmap("tab10")
    colors = {d: cmap(i % 10) for i, d in enumerate(detectors)}
    for ax, language in zip(axes.flat, languages):
        for procedure, lang, p, r in points:
            if lang is not language or (procedure, lang) not in kept:
                continue
            if p is None or r is None:
                continue
            ax.scatter([p], [r], color=colors[procedure.detector], s=18)
            ax.annotate(
                procedure.corpus_type.value, (p, r), fontsize=7,
                textcoords="offset points", xytext=(3, 3),
            )
        ax.set_title(language.value)
    fig.supxlabel("precision")
    fig.supylabel("recall")
    save(fig, "pr_scatter.svg")

    # Normalized speed dot plot.
    fig, ax = plt.subplots(figsize=(8, 4))
    for i, ct in enumerate(CorpusType):
        for detector in sorted({d for d, _ in speeds}):
            s = speeds.get((detector, ct))
            if s is not None:
                ax.scatter([s], [i], color=colors.get(detector, "black"), s=18)
    ax.set_yticks(range(len(CorpusType)), [ct.value for ct in CorpusType])
    ax.set_xlabel("speed score (fastest = 1)")
    save(fig, "speed_dots.svg")

    # Best MAP per detector against beta, one panel per gamma.
    betas = list(sim_config.beta_grid)
    fig, axes = plt.subplots(
        1, len(sim_config.gamma_set), figsize=(4 * len(sim_config.gamma_set), 4),
        sharey=True,
    )
    if len(sim_config.gamma_set) == 1:
        axes = [axes]
    for ax, gamma in zip(axes, sim_config.gamma_set):
        per_detector: dict = {}
        for beta in betas:
            best = simulate.best_per_algorithm(results, FWeights(beta=beta, gamma=gamma))
            for detector, (_, value) in best.items():
                per_detector.setdefault(detector, []).append(value)
        for detector, values in sorted(per_detector.items()):
            ax.plot(betas, values, label=detector, color=colors.get(detector))
        ax.set_title(f"gamma = {gamma}")
        ax.set_xlabel("beta")
    axes[0].set_ylabel("max MAP estimate")
    axes[-1].legend(fontsize=7)
    save(fig, "map_curves.svg")


# --- argument parsing --------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common(parser):
    parser.add_argument("--records", required=False, help="annotated records (.jsonl or .csv)")
    parser.add_argument("--weights", help="database weights CSV (language,config,count)")
    parser.add_argument(
        "--timings",
        help="recorded timing table CSV; overrides wall-clock measurement",
    )
    parser.add_argument("--out", required=False, help="output directory")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--draws", type=int)
    parser.add_argument("--beta-grid", help="comma-separated beta values")
    parser.add_argument("--gamma-set", help="comma-separated gamma values")
    parser.add_argument(
        "--mixture-mode", choices=["weighted_sum", "categorical_component"]
    )
    parser.add_argument("--grouping", choices=[g.value for g in evaluate.Grouping])
    parser.add_argument("--repeats", type=int)
    parser.add_argument("--no-plots", action="store_true")
    parser.add_argument(
        "--adapter", action="append", default=[], metavar="NAME=COMMAND",
        help="external detector adapter (repeatable)",
    )
    parser.add_argument("--seed-texts", help="JSON of language -> seed texts for the builtin detector")
    parser.add_argument("--config", help="JSON config file; flags override it")


def _parse_grid(text, default):
    if text is None:
        return default
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad grid {text!r}") from exc


def _config_from_args(args) -> RunConfig:
    file_config = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            file_config = json.load(fh)

    def pick(flag_value, key, default=None):
        if flag_value is not None and flag_value != []:
            return flag_value
        return file_config.get(key, default)

    adapters = {}
    for spec in pick(args.adapter, "adapters", []):
        if isinstance(spec, str):
            if "=" not in spec:
                raise UsageError(f"--adapter expects NAME=COMMAND, got {spec!r}")
            name, command = spec.split("=", 1)
            adapters[name] = command
        else:
            adapters.update(spec)

    records_path = pick(args.records, "records")
    out_dir = pick(args.out, "out")
    if not records_path or not out_dir:
        raise UsageError("--records and --out are required (flag or config file)")
    return RunConfig(
        records_path=records_path,
        out_dir=out_dir,
        weights_path=pick(args.weights, "weights"),
        timings_path=pick(args.timings, "timings"),
        seed_texts_path=pick(args.seed_texts, "seed_texts"),
        adapters=adapters,
        seed=pick(args.seed, "seed", 0),
        draws=pick(args.draws, "draws", simulate.DEFAULT_DRAWS),
        beta_grid=_parse_grid(args.beta_grid, tuple(file_config.get("beta_grid", simulate.DEFAULT_BETA_GRID))),
        gamma_set=_parse_grid(args.gamma_set, tuple(file_config.get("gamma_set", simulate.DEFAULT_GAMMA_SET))),
        mixture_mode=pick(args.mixture_mode, "mixture_mode", "weighted_sum"),
        grouping=evaluate.Grouping(
            pick(args.grouping, "grouping", evaluate.Grouping.BY_LANGUAGE_AND_CONFIG.value)
        ),
        repeats=pick(args.repeats, "repeats", 1),
        plots=not (args.no_plots or file_config.get("no_plots", False)),
    )


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = _Parser(prog="langbench")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("evaluate", "simulate"):
        _add_common(sub.add_parser(name))

    try:
        args = parser.parse_args(argv)
        config = _config_from_args(args)
        if args.command == "evaluate":
            cmd_evaluate(config)
        else:
            cmd_simulate(config)
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (records.IngestError, FileNotFoundError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except DetectorError as exc:
        print(f"detector error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - safety net
        print(f"internal error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
