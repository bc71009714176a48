"""Detectors, the procedure enumeration, and the completeness audit.

A *procedure* is one (detector, corpus type) pair; a registry of d
detectors enumerates exactly 4*d procedures. The module ships a built-in
character n-gram Naive Bayes detector and a client for external detector
processes speaking a newline-delimited JSON wire protocol, so third-party
systems plug in without being reimplemented. Detectors that cannot return
a prediction for every document are flagged incomplete and excluded
downstream.
"""
from __future__ import annotations

import json
import math
import shlex
import subprocess
import time
import unicodedata
from dataclasses import dataclass
from typing import Optional

from .corpora import CorpusDocument, CorpusType


class DetectorError(RuntimeError):
    """A detector failed on a document; carries the record id when known."""

    def __init__(self, message: str, record_id: Optional[str] = None):
        super().__init__(message)
        self.record_id = record_id


class ProtocolError(DetectorError):
    """An external adapter violated the wire protocol."""


@dataclass(frozen=True)
class ProcedureId:
    detector: str
    corpus_type: CorpusType

    def __str__(self) -> str:
        return f"{self.detector}/{self.corpus_type.value}"


@dataclass(frozen=True)
class Prediction:
    record_id: str
    procedure: ProcedureId
    raw_language: str
    confidence: Optional[float] = None

    def __post_init__(self):
        if not self.raw_language:
            raise ValueError(f"empty prediction for record {self.record_id!r}")


def _normalize(text: str) -> str:
    return unicodedata.normalize("NFC", text).lower()


def _extract_ngrams(text: str, lo: int, hi: int) -> list:
    grams = []
    for n in range(lo, hi + 1):
        grams.extend(text[i : i + n] for i in range(len(text) - n + 1))
    return grams


@dataclass(frozen=True)
class NgramModel:
    """Add-one-smoothed character n-gram Naive Bayes model.

    Likelihoods are smoothed over the union vocabulary of all languages,
    so each language's distribution over that vocabulary is normalized.
    """

    n_range: tuple
    log_priors: dict
    log_likelihoods: dict
    log_unseen: dict  # per-language log prob of a zero-count n-gram

    @property
    def languages(self) -> list:
        return sorted(self.log_priors)


def train_ngram_model(seed_texts: dict, n_range: tuple = (1, 3)) -> NgramModel:
    """Train the built-in detector from per-language seed texts.

    Priors are proportional to per-language document counts; likelihoods
    are add-one smoothed relative n-gram frequencies over the union
    vocabulary.
    """
    lo, hi = n_range
    if not (1 <= lo <= hi <= 5):
        raise ValueError(f"invalid n-gram range {n_range}")
    if not seed_texts:
        raise ValueError("empty seed set")

    gram_counts: dict = {}
    doc_counts: dict = {}
    vocab: set = set()
    for lang, texts in seed_texts.items():
        counts: dict = {}
        n_docs = 0
        for text in texts:
            norm = _normalize(text)
            grams = _extract_ngrams(norm, lo, hi)
            if not grams:
                continue
            n_docs += 1
            for g in grams:
                counts[g] = counts.get(g, 0) + 1
        if n_docs == 0:
            raise ValueError(f"language {lang!r} has no usable seed text")
        gram_counts[lang] = counts
        doc_counts[lang] = n_docs
        vocab.update(counts)

    total_docs = sum(doc_counts.values())
    vocab_size = len(vocab)
    log_priors = {
        lang: math.log(n / total_docs) for lang, n in doc_counts.items()
    }
    log_likelihoods = {}
    log_unseen = {}
    for lang, counts in gram_counts.items():
        total = sum(counts.values())
        denom = total + vocab_size
        for g, c in counts.items():
            log_likelihoods[(lang, g)] = math.log((c + 1) / denom)
        log_unseen[lang] = math.log(1 / denom)
    return NgramModel(
        n_range=(lo, hi),
        log_priors=log_priors,
        log_likelihoods=log_likelihoods,
        log_unseen=log_unseen,
    )


def ngram_detect(model: NgramModel, text: str) -> tuple:
    """Classify a text; returns (language, normalized posterior).

    Deterministic: exact posterior ties break lexicographically on the
    language code.
    """
    lo, hi = model.n_range
    grams = _extract_ngrams(_normalize(text), lo, hi)
    if not grams:
        raise DetectorError("no n-grams extractable from input text")
    scores = {}
    for lang in model.languages:
        s = model.log_priors[lang]
        unseen = model.log_unseen[lang]
        lik = model.log_likelihoods
        for g in grams:
            s += lik.get((lang, g), unseen)
        scores[lang] = s
    # log-sum-exp normalization for the posterior of the winner
    m = max(scores.values())
    total = sum(math.exp(s - m) for s in scores.values())
    best = min(lang for lang, s in scores.items() if s == m)
    return best, math.exp(scores[best] - m) / total


@dataclass
class DetectorHandle:
    """A named detector; ``detect`` maps text to (language, confidence)."""

    name: str
    kind: str = "builtin"  # "builtin" | "external"
    declared_languages: Optional[set] = None

    def detect(self, text: str) -> tuple:
        raise NotImplementedError


@dataclass
class NgramDetector(DetectorHandle):
    """Built-in pure detector backed by an :class:`NgramModel`."""

    model: Optional[NgramModel] = None

    def __post_init__(self):
        if self.model is None:
            raise ValueError("NgramDetector requires a model")
        self.kind = "builtin"
        if self.declared_languages is None:
            self.declared_languages = set(self.model.languages)

    def detect(self, text: str) -> tuple:
        return ngram_detect(self.model, text)


@dataclass
class CallableDetector(DetectorHandle):
    """Wrap any (text) -> (language, confidence) callable as a detector."""

    fn: Optional[object] = None

    def detect(self, text: str) -> tuple:
        return self.fn(text)


class ExternalDetector(DetectorHandle):
    """Client for an adapter process speaking the wire protocol.

    Protocol (newline-delimited JSON over the adapter's std streams):
      handshake  adapter emits ``{"name": ..., "languages": [...] | null}``
      request    ``{"id": ..., "text": ...}`` per document
      response   ``{"id": ..., "lang": ..., "conf": ...}`` same order
      end        host closes the request stream; adapter flushes, exits 0
    """

    def __init__(self, name: str, command: str):
        super().__init__(name=name, kind="external")
        self.command = command

    def detect(self, text: str) -> tuple:
        preds, _ = self.run_batch([CorpusDocument("_", CorpusType.T, text)])
        return preds[0]

    def run_batch(self, corpus: list) -> tuple:
        """Round-trip a document batch; returns (list of (lang, conf), seconds).

        Elapsed time covers the request/response loop only; process
        startup and the handshake are excluded (model warm-up is not part
        of detection work).
        """
        argv = shlex.split(self.command)
        proc = subprocess.Popen(
            argv,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            encoding="utf-8",
        )
        try:
            handshake_line = proc.stdout.readline()
            if not handshake_line:
                raise ProtocolError(f"adapter {self.name!r}: no handshake")
            try:
                handshake = json.loads(handshake_line)
            except json.JSONDecodeError as exc:
                raise ProtocolError(
                    f"adapter {self.name!r}: bad handshake: {exc.msg}"
                ) from exc
            if handshake.get("name") != self.name:
                raise ProtocolError(
                    f"adapter announced {handshake.get('name')!r}, "
                    f"expected {self.name!r}"
                )
            langs = handshake.get("languages")
            if langs is not None:
                self.declared_languages = set(langs)

            results = []
            start = time.perf_counter()
            for doc in corpus:
                request = json.dumps(
                    {"id": doc.record_id, "text": doc.text}, ensure_ascii=False
                )
                proc.stdin.write(request + "\n")
                proc.stdin.flush()
                line = proc.stdout.readline()
                if not line:
                    raise ProtocolError(
                        f"adapter {self.name!r} closed the stream",
                        record_id=doc.record_id,
                    )
                response = json.loads(line)
                if response.get("id") != doc.record_id:
                    raise ProtocolError(
                        f"out-of-order response: got {response.get('id')!r}, "
                        f"expected {doc.record_id!r}",
                        record_id=doc.record_id,
                    )
                lang = response.get("lang")
                if not lang:
                    raise DetectorError(
                        f"adapter {self.name!r} returned no language",
                        record_id=doc.record_id,
                    )
                results.append((lang, response.get("conf")))
            elapsed = time.perf_counter() - start
            proc.stdin.close()
            code = proc.wait(timeout=30)
            if code != 0:
                raise ProtocolError(
                    f"adapter {self.name!r} exited with status {code}"
                )
            return results, elapsed
        finally:
            if proc.poll() is None:
                proc.kill()
                proc.wait()


def run_procedure(detector: DetectorHandle, corpus: list) -> tuple:
    """Run a detector over a complete corpus.

    Returns (predictions, elapsed_seconds). The clock covers the detection
    loop only; for external detectors the protocol round-trips are part of
    that loop and therefore counted.
    """
    if not corpus:
        raise ValueError("empty corpus")
    corpus_type = corpus[0].corpus_type
    procedure = ProcedureId(detector=detector.name, corpus_type=corpus_type)

    if isinstance(detector, ExternalDetector):
        results, elapsed = detector.run_batch(corpus)
    else:
        results = []
        start = time.perf_counter()
        for doc in corpus:
            try:
                results.append(detector.detect(doc.text))
            except DetectorError as exc:
                raise DetectorError(str(exc), record_id=doc.record_id) from exc
        elapsed = time.perf_counter() - start

    predictions = []
    for doc, (lang, conf) in zip(corpus, results):
        if not lang:
            raise DetectorError(
                f"detector {detector.name!r} returned no language",
                record_id=doc.record_id,
            )
        predictions.append(
            Prediction(
                record_id=doc.record_id,
                procedure=procedure,
                raw_language=lang,
                confidence=conf,
            )
        )
    return predictions, elapsed


def audit_completeness(detector: DetectorHandle, corpora: dict) -> dict:
    """Check that a detector predicts every document of every corpus.

    ``corpora`` maps corpus type to document list (all built from the same
    record set). Incomplete detectors must be excluded from evaluation.
    Failures are data, not exceptions.
    """
    failures = []
    for corpus_type, corpus in corpora.items():
        try:
            predictions, _ = run_procedure(detector, corpus)
        except (DetectorError, ValueError) as exc:
            failures.append(
                {
                    "corpus_type": corpus_type,
                    "record_id": getattr(exc, "record_id", None),
                    "reason": str(exc),
                }
            )
            continue
        if len(predictions) != len(corpus):
            failures.append(
                {
                    "corpus_type": corpus_type,
                    "record_id": None,
                    "reason": "prediction count mismatch",
                }
            )
    return {"complete": not failures, "failures": failures}


class DetectorRegistry:
    """Holds uniquely named detectors and enumerates procedures."""

    def __init__(self):
        self._detectors: dict = {}

    def register(self, detector: DetectorHandle) -> None:
        if detector.name in self._detectors:
            raise ValueError(f"duplicate detector name {detector.name!r}")
        self._detectors[detector.name] = detector

    def remove(self, name: str) -> None:
        del self._detectors[name]

    @property
    def detectors(self) -> list:
        return list(self._detectors.values())

    def get(self, name: str) -> DetectorHandle:
        return self._detectors[name]

    def procedures(self) -> list:
        """All (detector, corpus type) pairs; 4 per registered detector."""
        return [
            ProcedureId(detector=name, corpus_type=ct)
            for name in self._detectors
            for ct in CorpusType
        ]
