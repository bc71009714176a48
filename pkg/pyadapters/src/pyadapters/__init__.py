"""Adapter processes exposing language-identification libraries over the
newline-delimited JSON wire protocol expected by the langbench host.

Each adapter is a standalone executable: it emits a one-line handshake
(its manifest), answers every request line with exactly one response line
in order, and exits 0 when the request stream closes. Adapters have no
dependency on the host package; they only speak its protocol.
"""
from .protocol import AdapterManifest, serve

__all__ = ["AdapterManifest", "serve"]
__version__ = "0.1.0"
