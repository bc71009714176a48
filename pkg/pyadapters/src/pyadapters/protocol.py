"""The adapter side of the wire protocol.

Protocol (newline-delimited JSON over std streams):
  handshake  adapter emits its manifest: ``{"name": ..., "languages":
             [...] | null, "library": ..., "version": ...}``
  request    ``{"id": ..., "text": ...}`` per document
  response   ``{"id": ..., "lang": ..., "conf": ...}`` in request order
  end        host closes the request stream; adapter flushes, exits 0

A malformed request line is unrecoverable: the adapter emits
``{"id": null, "error": <msg>}`` and stops with exit status 3. A failure
of the underlying library on a single document is recoverable: the
response carries ``"lang": ""`` and the loop continues (the host's
completeness audit turns that into an exclusion).
"""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

EXIT_OK = 0
EXIT_PROTOCOL = 3


@dataclass(frozen=True)
class AdapterManifest:
    """Identity of an adapter; serialized verbatim as the handshake line."""

    name: str
    library: str
    languages: Optional[Sequence[str]] = None
    version: str = "0"

    def __post_init__(self):
        if not self.name:
            raise ValueError("manifest name must be non-empty")

    def handshake(self) -> dict:
        return {
            "name": self.name,
            "languages": list(self.languages) if self.languages is not None else None,
            "library": self.library,
            "version": self.version,
        }


def _emit(stream, payload: dict) -> None:
    stream.write(json.dumps(payload, ensure_ascii=False) + "\n")
    stream.flush()


def serve(
    detect: Callable[[str], tuple],
    manifest: AdapterManifest,
    stdin=None,
    stdout=None,
) -> int:
    """Run the request loop; returns the process exit status.

    ``detect`` maps a text to ``(language, confidence)``; any exception it
    raises is reported as an empty-language response for that document.
    """
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout

    _emit(stdout, manifest.handshake())
    for line in stdin:
        if not line.strip():
            continue
        try:
            request = json.loads(line)
            doc_id = request["id"]
            text = request["text"]
            if not isinstance(text, str):
                raise TypeError("'text' must be a string")
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            _emit(stdout, {"id": None, "error": f"malformed request: {exc}"})
            return EXIT_PROTOCOL
        try:
            lang, conf = detect(text)
        except Exception:
            lang, conf = "", None
        _emit(stdout, {"id": doc_id, "lang": lang, "conf": conf})
    return EXIT_OK
