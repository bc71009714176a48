"""Fixed-answer adapter for protocol testing.

Answers every request with the same language, deterministically and with
no third-party dependency, so the host's protocol handling can be tested
anywhere. ``--empty-nth N`` makes the Nth request (1-based) return an
empty language, simulating a library failure on one document.
"""
from __future__ import annotations

import argparse
import sys

from .protocol import AdapterManifest, serve


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pyadapter-echo", description=__doc__.strip().splitlines()[0]
    )
    parser.add_argument("--name", default="echo-test", help="handshake name")
    parser.add_argument("--lang", default="en", help="language to answer with")
    parser.add_argument(
        "--conf", type=float, default=None, help="confidence to report (default null)"
    )
    parser.add_argument(
        "--empty-nth",
        type=int,
        default=None,
        metavar="N",
        help="return an empty language for the Nth request (1-based)",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    manifest = AdapterManifest(
        name=args.name, library="builtin-echo", languages=[args.lang], version="1"
    )
    seen = 0

    def detect(text: str) -> tuple:
        nonlocal seen
        seen += 1
        if args.empty_nth is not None and seen == args.empty_nth:
            return "", None
        return args.lang, args.conf

    return serve(detect, manifest)


if __name__ == "__main__":
    sys.exit(main())
