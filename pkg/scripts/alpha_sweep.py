#!/usr/bin/env python3
"""Deterministic cycle sweep plus annulus certification across a list of
coupling strengths; writes cycles_sweep.csv and cert_sweep.csv."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from cycleflow.cli import main as cycleflow_main

DEFAULT_ALPHAS = "1,1.5,2,5,10,20,50,100"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/sweep", help="output root directory")
    ap.add_argument("--alphas", default=DEFAULT_ALPHAS, help="comma-separated values")
    ap.add_argument("--radial", type=int, default=256, help="radial grid nodes")
    ap.add_argument("--angular", type=int, default=1024, help="angular grid nodes")
    ap.add_argument("--refine", action="store_true", help="also run a doubled grid")
    args = ap.parse_args()
    root = Path(args.out)

    rc = cycleflow_main(["sweep", "--alphas", args.alphas, "--out-dir", str(root)])
    if rc != 0:
        return rc
    argv = ["certify", "--alphas", args.alphas, "--radial", str(args.radial),
            "--angular", str(args.angular), "--out-dir", str(root)]
    if args.refine:
        argv.append("--refine")
    return cycleflow_main(argv)


if __name__ == "__main__":
    sys.exit(main())
