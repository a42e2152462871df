#!/usr/bin/env python3
"""Run both bundled campaigns and write their median comparison tables.

Usage::

    python3 scripts/replicate_tables.py [--out-root runs] [--seeds 0:20]
                                        [--traces {full,none}]

Each campaign produces <out-root>/<campaign>/summary.csv, per-pairing
comparison CSVs, and a tables_report.txt with the median RMSE, control
effort, and event counts per scenario.
"""

import argparse
import sys
from pathlib import Path

from etcnet.cli import main as cli_main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-root", default="runs")
    parser.add_argument("--seeds", help="override seed list, e.g. 0:20 or 0,1,2")
    parser.add_argument("--traces", choices=["full", "none"], default="none",
                        help="per-run trace CSVs (default none: summaries only)")
    args = parser.parse_args()

    worst = 0
    for name in ("example1", "example2"):
        argv = [
            "run", str(CONFIGS / f"{name}.cfg"),
            "--out", str(Path(args.out_root) / name),
            "--replicate-tables",
            "--traces", args.traces,
        ]
        if args.seeds:
            argv += ["--seeds", args.seeds]
        code = cli_main(argv)
        worst = max(worst, code)
        report = Path(args.out_root) / name / "tables_report.txt"
        if report.exists():
            print(report.read_text())
    return worst


if __name__ == "__main__":
    sys.exit(main())
