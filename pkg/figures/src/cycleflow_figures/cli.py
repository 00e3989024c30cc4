"""Command-line entry: name the two run manifests, the cycle manifest, and
an output directory; the tool reads only the files those manifests list."""
from __future__ import annotations

import argparse
import sys

from .jobs import FigureJob, SchemaError
from .plots import render_all


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cycleflow-figures",
        description="Render moment traces and particle snapshot grids from "
                    "cycleflow run outputs.",
    )
    parser.add_argument("--run-a", required=True,
                        help="manifest.json (or its directory) of the eps = 0.25 run")
    parser.add_argument("--run-b", required=True,
                        help="manifest.json (or its directory) of the eps = 0.5 run")
    parser.add_argument("--cycle", required=True,
                        help="manifest.json (or its directory) of the cycle command")
    parser.add_argument("--out", required=True, help="output directory for images")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = FigureJob.from_manifests(args.run_a, args.run_b, args.cycle, args.out)
        written = render_all(job)
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
