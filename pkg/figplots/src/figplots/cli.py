"""figplot: render a simulator CSV as an image.

Exit codes: 0 success; 2 unreadable/odd input (missing file, schema or kind
mismatch, missing columns, empty data); 5 unwritable output.
"""

from __future__ import annotations

import argparse
import sys

from .plotting import KINDS, PlotError, PlotJob, plot


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figplot",
        description="Regenerate figures from simulator trajectory/sweep CSVs.")
    parser.add_argument("--kind", required=True, choices=KINDS,
                        help="what the CSV represents / how to draw it")
    parser.add_argument("--input", required=True, help="input CSV path")
    parser.add_argument("--output", required=True,
                        help="output image path (format from the extension, "
                             "e.g. .png, .pdf, .svg)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = PlotJob(input_path=args.input, kind=args.kind,
                      output_path=args.output)
        plot(job)
    except PlotError as exc:
        print(f"figplot: error: {exc}", file=sys.stderr)
        return exc.exit_code
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
