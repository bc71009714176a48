"""Adapters wrapping off-the-shelf language-identification libraries.

Each wrapped library ships as its own executable so partial installations
degrade gracefully: a missing library makes that one adapter print a
diagnostic and exit 2 before the handshake, which the host reports as a
protocol error for that detector only. Confidence is forwarded when the
library provides one, else null.
"""
from __future__ import annotations

import sys

from .protocol import AdapterManifest, serve

EXIT_UNAVAILABLE = 2


def _unavailable(library: str, exc: Exception) -> int:
    print(
        f"adapter unavailable: {library} is not installed ({exc})",
        file=sys.stderr,
    )
    return EXIT_UNAVAILABLE


def langdetect_main(argv=None) -> int:
    """Adapter over the ``langdetect`` port of Google's language-detection."""
    try:
        import langdetect
        from langdetect import DetectorFactory
    except ImportError as exc:
        return _unavailable("langdetect", exc)

    DetectorFactory.seed = 0  # the library is randomized by default

    def detect(text: str) -> tuple:
        best = langdetect.detect_langs(text)[0]
        return best.lang, float(best.prob)

    manifest = AdapterManifest(
        name="langdetect",
        library="langdetect",
        languages=None,
        version=getattr(langdetect, "__version__", "unknown"),
    )
    return serve(detect, manifest)


def langid_main(argv=None) -> int:
    """Adapter over the pretrained ``langid.py`` classifier."""
    try:
        import langid
        from langid.langid import LanguageIdentifier, model
    except ImportError as exc:
        return _unavailable("langid", exc)

    identifier = LanguageIdentifier.from_modelstring(model, norm_probs=True)

    def detect(text: str) -> tuple:
        lang, prob = identifier.classify(text)
        return lang, float(prob)

    manifest = AdapterManifest(
        name="langid",
        library="langid",
        languages=sorted(identifier.nb_classes),
        version=getattr(langid, "__version__", "unknown"),
    )
    return serve(detect, manifest)
