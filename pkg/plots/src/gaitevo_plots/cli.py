"""Command-line figure renderer for gaitevo result directories."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .figures import FIGURE_KINDS, SchemaMismatch, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaitevo-plot",
        description="Render experiment CSV logs as figures.",
    )
    parser.add_argument("--kind", choices=FIGURE_KINDS, required=True)
    parser.add_argument("--in", dest="in_dir", type=Path, required=True, help="directory with summary CSVs")
    parser.add_argument("--out", type=Path, required=True, help="output image file")
    parser.add_argument("--style", type=Path, default=None, help="JSON file overriding colors/dpi")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    style = json.loads(args.style.read_text()) if args.style else None
    try:
        render(args.kind, args.in_dir, args.out, style)
    except SchemaMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
