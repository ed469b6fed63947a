"""Command line entry points: convert a benchmark, verify a directory."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .catalog import CATALOG, lookup
from .convert import CountMismatch, IngestError, convert_raw
from .upstream import UpstreamUnavailable, load_upstream
from .verify import verify_directory

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISMATCH = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphingest",
        description="convert public graph benchmarks to the interchange"
                    " layout and verify their statistics")
    sub = parser.add_subparsers(dest="command", required=True)

    conv = sub.add_parser("convert", help="download and convert one dataset")
    conv.add_argument("--name", required=True,
                      help="dataset name (" + ", ".join(sorted(CATALOG)) + ")")
    conv.add_argument("--out", required=True, help="output directory")
    conv.add_argument("--cache", default="upstream_cache",
                      help="where upstream downloads are kept")

    ver = sub.add_parser("verify", help="re-check a converted directory")
    ver.add_argument("--dir", required=True, help="interchange directory")
    ver.add_argument("--name", default=None,
                     help="compare against this catalog entry"
                          " (default: the manifest name)")
    return parser


def _cmd_convert(args) -> int:
    stats = lookup(args.name)
    if stats is None:
        print(f"unknown dataset {args.name!r}; known:"
              f" {', '.join(sorted(CATALOG))}", file=sys.stderr)
        return EXIT_USAGE
    try:
        raw = load_upstream(stats.key, args.cache)
    except UpstreamUnavailable as exc:
        print(f"cannot load upstream data: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = convert_raw(raw, args.out, expected=stats)
    except CountMismatch as exc:
        print(exc, file=sys.stderr)
        return EXIT_MISMATCH
    except IngestError as exc:
        print(f"conversion failed: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(report.to_text())
    return EXIT_OK


def _cmd_verify(args) -> int:
    directory = Path(args.dir)
    if not directory.is_dir():
        print(f"not a directory: {directory}", file=sys.stderr)
        return EXIT_USAGE
    expected = None
    if args.name is not None:
        expected = lookup(args.name)
        if expected is None:
            print(f"unknown dataset {args.name!r}", file=sys.stderr)
            return EXIT_USAGE
    else:
        manifest = directory / "manifest.json"
        if manifest.is_file():
            try:
                expected = lookup(str(json.loads(manifest.read_text())
                                      .get("name", "")))
            except json.JSONDecodeError:
                expected = None
    report = verify_directory(directory, expected=expected)
    print(report.to_text())
    if expected is None:
        print("  (no catalog entry; structural checks only)")
    return EXIT_OK if report.ok else EXIT_MISMATCH


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "convert":
        return _cmd_convert(args)
    return _cmd_verify(args)


if __name__ == "__main__":
    sys.exit(main())
